//! CSV and JSON emitters for the computed artifacts. All numeric output
//! uses 17 significant digits so files round-trip exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::dynamics::{EigenvalueTrack, FidelityCurve, RobustnessGrid};
use crate::error::Result;
use crate::frames::FrameSequence;
use crate::search::AcceptedPerturbation;

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Columns `tau,infidelity`.
pub fn write_fidelity_curve_csv(path: &Path, curve: &FidelityCurve) -> Result<()> {
    let mut out = String::from("tau,infidelity\n");
    for (t, v) in curve.taus.iter().zip(&curve.infidelities) {
        out.push_str(&fmt(*t));
        out.push(',');
        out.push_str(&fmt(*v));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Long format `delta,sigma,fidelity`, row-major over offsets.
pub fn write_robustness_csv(path: &Path, grid: &RobustnessGrid) -> Result<()> {
    let mut out = String::from("delta,sigma,fidelity\n");
    for (i, d) in grid.offsets.iter().enumerate() {
        for (j, s) in grid.scales.iter().enumerate() {
            out.push_str(&fmt(*d));
            out.push(',');
            out.push_str(&fmt(*s));
            out.push(',');
            out.push_str(&fmt(grid.fidelity[i][j]));
            out.push('\n');
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Columns `t,lambda_1..lambda_d` (ascending traces).
pub fn write_eigenvalue_tracks_csv(path: &Path, track: &EigenvalueTrack) -> Result<()> {
    let d = track.traces.len();
    let mut out = String::from("t");
    for j in 0..d {
        out.push_str(&format!(",lambda_{}", j + 1));
    }
    out.push('\n');
    for (m, t) in track.times.iter().enumerate() {
        out.push_str(&fmt(*t));
        for j in 0..d {
            out.push(',');
            out.push_str(&fmt(track.traces[j][m]));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Columns `t,q` for one frame's interior Q-curve.
pub fn write_q_curve_csv(path: &Path, seq: &FrameSequence, frame: usize) -> Result<()> {
    let data = seq
        .frame(frame)
        .ok_or_else(|| crate::error::Error::InvalidParams {
            reason: format!("frame {frame} not computed"),
        })?;
    let n = data.q_interior.len() + 1;
    let dt = seq.tau / n as f64;
    let mut out = String::from("t,q\n");
    for (k, q) in data.q_interior.iter().enumerate() {
        out.push_str(&fmt((k + 1) as f64 * dt));
        out.push(',');
        out.push_str(&fmt(*q));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[derive(Serialize)]
struct FrameSummary<'a> {
    q_factors: &'a [f64],
    q_super: f64,
    peak_frame: usize,
    truncated: bool,
}

/// Summary JSON with {Q_n}, Q_s, s, and the truncation flag. Infinite
/// Q-factors serialize as JSON null.
pub fn write_frame_summary_json(path: &Path, seq: &FrameSequence) -> Result<()> {
    let q_factors = seq.q_factors();
    let summary = FrameSummary {
        q_factors: &q_factors,
        q_super: seq.q_super,
        peak_frame: seq.peak_frame,
        truncated: seq.truncated,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("serializable summary");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// JSON lines, one record per accepted perturbation.
pub fn write_search_log_jsonl(path: &Path, accepted: &[AcceptedPerturbation]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    for record in accepted {
        let line = serde_json::to_string(record).expect("serializable record");
        writeln!(file, "{line}")?;
    }
    Ok(())
}

/// Deviation-angle curves, columns `t,alpha_<n>,...`.
pub fn write_deviation_angles_csv(
    path: &Path,
    times: &[f64],
    curves: &[crate::frames::DeviationAngles],
) -> Result<()> {
    let mut out = String::from("t");
    for c in curves {
        out.push_str(&format!(",alpha_{}", c.frame));
    }
    out.push('\n');
    for (m, t) in times.iter().enumerate() {
        out.push_str(&fmt(*t));
        for c in curves {
            out.push(',');
            out.push_str(&fmt(c.angles[m]));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}
