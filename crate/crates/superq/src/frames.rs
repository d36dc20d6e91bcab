//! Iterated superadiabatic frame hierarchy: builds the diagonalizing frames
//! V_n(t) of a sampled Hamiltonian, splits each frame Hamiltonian into its
//! diagonal part D_n and inertial term C_n = −iV_n†V̇_n, and computes the
//! adiabatic Q-factor of every frame together with the superadiabatic
//! Q-factor Q_s = max_n Q_n.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{bloch_vector_matrix, eigh_raw, frobenius_norm, CMatrix, C64};
use crate::propagate::StateTrajectory;
use crate::pulse::{ControlSystem, Waveform};

/// Relative floor guarding the Q division: points with
/// ||C|| ≤ `C_FLOOR`·||D|| are recorded as +∞.
pub const C_FLOOR: f64 = 1e-12;
/// Adjacent eigenvalue gaps at or below `GAP_TOL` × (spectral spread) are
/// treated as degenerate.
pub const GAP_TOL: f64 = 1e-9;
/// Number of frames computed by default ("first ten Q-factors").
pub const DEFAULT_N_MAX: usize = 10;

/// A Hamiltonian sampled on the uniform waveform grid.
#[derive(Debug, Clone)]
pub struct HamiltonianTrack {
    tau: f64,
    samples: Vec<CMatrix>,
}

impl HamiltonianTrack {
    pub fn from_operators(
        tau: f64,
        operators: Vec<crate::linalg::HermitianOperator>,
    ) -> Result<Self> {
        let samples: Vec<CMatrix> = operators.into_iter().map(|h| h.into_matrix()).collect();
        Self::from_matrices(tau, samples)
    }

    pub(crate) fn from_matrices(tau: f64, samples: Vec<CMatrix>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidParams {
                reason: format!("track needs at least 3 grid points, got {}", samples.len()),
            });
        }
        let dim = samples[0].nrows();
        for s in &samples {
            if s.nrows() != dim || s.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.nrows(),
                });
            }
        }
        Ok(Self { tau, samples })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.samples[0].nrows()
    }

    pub fn n_steps(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.tau / self.n_steps() as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.samples.len()).map(|m| m as f64 * dt).collect()
    }

    pub fn samples(&self) -> &[CMatrix] {
        &self.samples
    }
}

/// H(t_m) = H₀ + Σ_k u_k(t_m) H_k at every grid point.
pub fn sample_hamiltonian(system: &ControlSystem, wf: &Waveform) -> Result<HamiltonianTrack> {
    let pairs = crate::propagate::control_samples(system, wf)?;
    let n = wf.n_steps();
    let samples = (0..=n)
        .map(|m| crate::propagate::hamiltonian_at(system, &pairs, |s| s[m]))
        .collect();
    HamiltonianTrack::from_matrices(wf.tau(), samples)
}

/// The instantaneous diagonalizing frame along a track: eigenvalues and
/// eigenvector columns at every grid point, ordered by continuity.
#[derive(Debug, Clone)]
pub struct FrameBasis {
    pub values: Vec<DVector<f64>>,
    pub vectors: Vec<CMatrix>,
}

fn degeneracy_check(values: &DVector<f64>, time: f64) -> Result<()> {
    let d = values.len();
    let mut sorted: Vec<f64> = values.iter().cloned().collect();
    sorted.sort_by(f64::total_cmp);
    let spread = sorted[d - 1] - sorted[0];
    let mut min_gap = f64::INFINITY;
    for k in 1..d {
        min_gap = min_gap.min(sorted[k] - sorted[k - 1]);
    }
    if min_gap <= GAP_TOL * spread {
        return Err(Error::DegenerateSpectrum { time, gap: min_gap });
    }
    Ok(())
}

/// Eigendecomposition ordered ascending, with each column's phase fixed so
/// its largest entry is real positive. Used at t = 0 to anchor the frame.
fn eigh_anchor(h: &CMatrix) -> (DVector<f64>, CMatrix) {
    let op = crate::linalg::HermitianOperator::new_unchecked(h.clone());
    let es = crate::linalg::eigh(&op);
    (es.values, es.vectors)
}

/// Eigendecomposition with columns matched to the previous grid point by
/// greedy maximal overlap and gauge-fixed so ⟨v(t_{m−1})|v(t_m)⟩ is real
/// and positive.
fn eigh_matched(h: &CMatrix, prev: &CMatrix) -> (DVector<f64>, CMatrix) {
    let (raw_values, raw_vectors) = eigh_raw(h);
    let d = raw_values.len();
    let mut used = [false; 8];
    let mut values = DVector::zeros(d);
    let mut vectors = CMatrix::zeros(d, d);
    for j in 0..d {
        let prev_col = prev.column(j);
        let mut best = usize::MAX;
        let mut best_mag = -1.0;
        for k in 0..d {
            if used[k] {
                continue;
            }
            let mag = prev_col.dotc(&raw_vectors.column(k)).norm();
            if mag > best_mag {
                best_mag = mag;
                best = k;
            }
        }
        used[best] = true;
        values[j] = raw_values[best];
        let overlap = prev_col.dotc(&raw_vectors.column(best));
        let mag = overlap.norm();
        let correction = if mag > 0.0 {
            overlap.conj() / mag
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            vectors[(i, j)] = raw_vectors[(i, best)] * correction;
        }
    }
    (values, vectors)
}

/// Track the diagonalizing frame along the whole grid.
///
/// Columns start in ascending eigenvalue order at t = 0; later points are
/// matched for continuity. Fails with `DegenerateSpectrum` at the first
/// grid point whose spectrum is degenerate to within [`GAP_TOL`].
pub fn diagonalizing_frame(track: &HamiltonianTrack) -> Result<FrameBasis> {
    let dt = track.dt();
    let mut values = Vec::with_capacity(track.samples().len());
    let mut vectors = Vec::with_capacity(track.samples().len());
    for (m, h) in track.samples().iter().enumerate() {
        let (vals, vecs) = if m == 0 {
            eigh_anchor(h)
        } else {
            eigh_matched(h, &vectors[m - 1])
        };
        degeneracy_check(&vals, m as f64 * dt)?;
        values.push(vals);
        vectors.push(vecs);
    }
    Ok(FrameBasis { values, vectors })
}

/// −i V† V̇ with V̇ from a central difference, Hermitized to suppress the
/// O(Δt²) asymmetry of the discretization.
fn inertial_central(v: &CMatrix, v_prev: &CMatrix, v_next: &CMatrix, dt: f64) -> CMatrix {
    let vdot = (v_next - v_prev).map(|z| z / (2.0 * dt));
    hermitized_inertial(v, &vdot)
}

/// One-sided second-order difference at the grid edge; `v1` and `v2` are
/// the first and second inward neighbors, `sign` is +1 at the left edge
/// and −1 at the right edge. Written difference-first so a constant frame
/// gives an exactly zero derivative.
fn inertial_one_sided(
    v: &CMatrix,
    v1: &CMatrix,
    v2: &CMatrix,
    dt: f64,
    sign: f64,
) -> CMatrix {
    // ±(4(V₁−V₀) − (V₂−V₀))/(2Δt) ≡ ±(−3V₀ + 4V₁ − V₂)/(2Δt)
    let d1 = v1 - v;
    let d2 = v2 - v;
    let vdot = d1
        .map(|z| z * 4.0)
        .zip_map(&d2, |x, y| x - y)
        .map(|z| z * (sign / (2.0 * dt)));
    hermitized_inertial(v, &vdot)
}

fn hermitized_inertial(v: &CMatrix, vdot: &CMatrix) -> CMatrix {
    let raw = (v.adjoint() * vdot).map(|z| z * C64::new(0.0, -1.0));
    let adj = raw.adjoint();
    raw.zip_map(&adj, |a, b| (a + b) * 0.5)
}

fn diagonal_part(v: &CMatrix, h: &CMatrix) -> CMatrix {
    v.adjoint() * h * v
}

fn q_ratio(d_norm: f64, c_norm: f64) -> f64 {
    if c_norm <= C_FLOOR * d_norm {
        f64::INFINITY
    } else {
        d_norm / c_norm
    }
}

/// One frame of the hierarchy.
#[derive(Debug, Clone)]
pub struct FrameData {
    /// D_n(t_m) = V_n†H_{n−1}V_n at every grid point.
    pub diag: Vec<CMatrix>,
    /// C_n(t_m) = −iV_n†V̇_n at every grid point.
    pub inertial: Vec<CMatrix>,
    /// Frame unitaries V_n(t_m).
    pub vectors: Vec<CMatrix>,
    /// Frame eigenvalues in the continuity order.
    pub values: Vec<DVector<f64>>,
    /// Q_n(t_m) at interior grid points m = 1..N−1.
    pub q_interior: Vec<f64>,
    /// Q_n = min over interior points.
    pub q_min: f64,
}

/// Result of one frame transformation step.
pub struct FrameStep {
    pub frame: FrameData,
    /// H_n = D_n + C_n, the input to the next iteration.
    pub next: HamiltonianTrack,
}

/// Transform a track into its instantaneously-diagonalizing frame,
/// splitting H_n = D_n + C_n.
pub fn next_frame(track: &HamiltonianTrack) -> Result<FrameStep> {
    let basis = diagonalizing_frame(track)?;
    let n = track.n_steps();
    let dt = track.dt();
    let vs = &basis.vectors;
    let mut diag = Vec::with_capacity(n + 1);
    let mut inertial = Vec::with_capacity(n + 1);
    for m in 0..=n {
        diag.push(diagonal_part(&vs[m], &track.samples()[m]));
        let c = if m == 0 {
            inertial_one_sided(&vs[0], &vs[1], &vs[2], dt, 1.0)
        } else if m == n {
            inertial_one_sided(&vs[n], &vs[n - 1], &vs[n - 2], dt, -1.0)
        } else {
            inertial_central(&vs[m], &vs[m - 1], &vs[m + 1], dt)
        };
        inertial.push(c);
    }
    let (q_interior, q_min) = q_curve(&diag, &inertial);
    let next_samples: Vec<CMatrix> = diag
        .iter()
        .zip(&inertial)
        .map(|(d, c)| d + c)
        .collect();
    let next = HamiltonianTrack::from_matrices(track.tau(), next_samples)?;
    Ok(FrameStep {
        frame: FrameData {
            diag,
            inertial,
            vectors: basis.vectors,
            values: basis.values,
            q_interior,
            q_min,
        },
        next,
    })
}

/// Q(t_m) = ||D(t_m)||_F / ||C(t_m)||_F at interior grid points, and the
/// minimum over them. Points below the [`C_FLOOR`] guard are +∞ and drop
/// out of the minimum; if every point is +∞ the minimum is +∞.
pub fn q_curve(diag: &[CMatrix], inertial: &[CMatrix]) -> (Vec<f64>, f64) {
    let n = diag.len() - 1;
    let mut interior = Vec::with_capacity(n.saturating_sub(1));
    let mut min = f64::INFINITY;
    for m in 1..n {
        let q = q_ratio(frobenius_norm(&diag[m]), frobenius_norm(&inertial[m]));
        min = min.min(q);
        interior.push(q);
    }
    (interior, min)
}

/// The iterated frame hierarchy with per-frame Q-factors.
#[derive(Debug, Clone)]
pub struct FrameSequence {
    pub tau: f64,
    pub frames: Vec<FrameData>,
    /// Q_s = max_n Q_n over the computed frames.
    pub q_super: f64,
    /// s: smallest frame index (1-based) achieving Q_s.
    pub peak_frame: usize,
    /// True when a degenerate spectrum stopped the iteration early.
    pub truncated: bool,
}

impl FrameSequence {
    pub fn q_factors(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.q_min).collect()
    }

    pub fn frame(&self, n: usize) -> Option<&FrameData> {
        self.frames.get(n.wrapping_sub(1))
    }
}

/// Iterate the frame transformation up to `n_max` frames.
///
/// A degenerate spectrum in frame 1 is fatal; in a higher frame it stops
/// the iteration, keeping the frames computed so far and setting the
/// truncation flag.
pub fn superadiabatic_q(track: &HamiltonianTrack, n_max: usize) -> Result<FrameSequence> {
    let mut frames: Vec<FrameData> = Vec::with_capacity(n_max);
    let mut truncated = false;
    let mut current = track.clone();
    for n in 1..=n_max {
        match next_frame(&current) {
            Ok(step) => {
                current = step.next;
                frames.push(step.frame);
            }
            Err(Error::DegenerateSpectrum { .. }) if n > 1 => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let mut q_super = f64::NEG_INFINITY;
    let mut peak_frame = 1;
    for (i, f) in frames.iter().enumerate() {
        if f.q_min > q_super {
            q_super = f.q_min;
            peak_frame = i + 1;
        }
    }
    Ok(FrameSequence {
        tau: track.tau(),
        frames,
        q_super,
        peak_frame,
        truncated,
    })
}

/// Q_n of a track, streamed point by point with an optional early abort.
///
/// Frames 1..n−1 are built in full; the final frame is scanned with a
/// running minimum, and the scan stops with `Ok(None)` as soon as the
/// minimum can no longer exceed `abort_below`. Interior Q values are
/// bit-identical to the full [`superadiabatic_q`] computation.
pub(crate) fn frame_q_min(
    track: &HamiltonianTrack,
    frame: usize,
    abort_below: Option<f64>,
) -> Result<Option<f64>> {
    assert!(frame >= 1);
    let mut current = track.clone();
    for _ in 1..frame {
        let step = next_frame(&current)?;
        current = step.next;
    }
    let n = current.n_steps();
    let dt = current.dt();
    let samples = current.samples();
    let mut v_window: [Option<CMatrix>; 3] = [None, None, None];
    let mut running = f64::INFINITY;
    for m in 0..=n {
        let (vals, vecs) = if m == 0 {
            eigh_anchor(&samples[0])
        } else {
            eigh_matched(&samples[m], v_window[2].as_ref().unwrap())
        };
        degeneracy_check(&vals, m as f64 * dt)?;
        v_window.rotate_left(1);
        v_window[2] = Some(vecs);
        if m >= 2 {
            let p = m - 1;
            let c = inertial_central(
                v_window[1].as_ref().unwrap(),
                v_window[0].as_ref().unwrap(),
                v_window[2].as_ref().unwrap(),
                dt,
            );
            let d = diagonal_part(v_window[1].as_ref().unwrap(), &samples[p]);
            let q = q_ratio(frobenius_norm(&d), frobenius_norm(&c));
            running = running.min(q);
            if let Some(threshold) = abort_below {
                if running <= threshold {
                    return Ok(None);
                }
            }
        }
    }
    Ok(Some(running))
}

/// Per-frame deviation-angle curve α_n(t) for a two-level system.
#[derive(Debug, Clone)]
pub struct DeviationAngles {
    pub frame: usize,
    /// Radians in [0, π], one per grid point.
    pub angles: Vec<f64>,
}

/// Angle between the frame-n Hamiltonian's Bloch vector and the frame-n
/// state's Bloch vector, for each requested frame.
///
/// The state is carried into frame n via ψ_n(t) = V_n†(t)···V_1†(t)ψ(t).
pub fn deviation_angles(
    seq: &FrameSequence,
    traj: &StateTrajectory,
    frames: &[usize],
) -> Result<Vec<DeviationAngles>> {
    let n_points = traj.states().len();
    if seq.frames.is_empty() {
        return Err(Error::InvalidParams {
            reason: "frame sequence is empty".into(),
        });
    }
    let dim = seq.frames[0].vectors[0].nrows();
    if dim != 2 {
        return Err(Error::UnsupportedDimension { dim });
    }
    if seq.frames[0].vectors.len() != n_points {
        return Err(Error::GridMismatch {
            reason: format!(
                "trajectory has {} samples, frame sequence has {}",
                n_points,
                seq.frames[0].vectors.len()
            ),
        });
    }
    let max_frame = frames.iter().cloned().max().unwrap_or(0);
    if max_frame == 0 || max_frame > seq.frames.len() {
        return Err(Error::InvalidParams {
            reason: format!(
                "requested frame out of range 1..={}",
                seq.frames.len()
            ),
        });
    }
    let dt = seq.tau / (n_points - 1) as f64;

    let mut transformed: Vec<nalgebra::DVector<C64>> = traj
        .states()
        .iter()
        .map(|s| s.amplitudes().clone())
        .collect();
    let mut result = Vec::new();
    for level in 1..=max_frame {
        let frame = &seq.frames[level - 1];
        for (m, psi) in transformed.iter_mut().enumerate() {
            *psi = frame.vectors[m].adjoint() * &*psi;
        }
        if frames.contains(&level) {
            let mut angles = Vec::with_capacity(n_points);
            for m in 0..n_points {
                let h_n = &frame.diag[m] + &frame.inertial[m];
                let hb = bloch_vector_matrix(&h_n)?;
                let h_len = (hb[0] * hb[0] + hb[1] * hb[1] + hb[2] * hb[2]).sqrt();
                let scale = frobenius_norm(&h_n).max(f64::MIN_POSITIVE);
                if h_len <= C_FLOOR * scale {
                    return Err(Error::ZeroVector {
                        time: m as f64 * dt,
                    });
                }
                let state =
                    crate::linalg::StateVector::new_unchecked(transformed[m].clone());
                let vb = crate::linalg::bloch_vector_state(&state)?;
                let v_len = (vb[0] * vb[0] + vb[1] * vb[1] + vb[2] * vb[2]).sqrt();
                let cos = ((hb[0] * vb[0] + hb[1] * vb[1] + hb[2] * vb[2])
                    / (h_len * v_len))
                    .clamp(-1.0, 1.0);
                angles.push(cos.acos());
            }
            result.push(DeviationAngles {
                frame: level,
                angles,
            });
        }
    }
    result.sort_by_key(|d| d.frame);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, sigma_x, sigma_y, sigma_z, HermitianOperator};
    use crate::pulse::{
        single_qubit_system, tanh_tan, two_qubit_guess, Channel, TanhTanParams, Waveform,
        CH_DELTA_OMEGA, CH_OMEGA1,
    };
    use approx::assert_relative_eq;

    fn single_qubit_waveform(
        omega1: impl Fn(f64) -> f64,
        delta: impl Fn(f64) -> f64,
        tau: f64,
        n: usize,
    ) -> Waveform {
        let grid: Vec<f64> = (0..=n).map(|m| m as f64 / n as f64 * tau).collect();
        Waveform::new(
            tau,
            n,
            vec![
                Channel {
                    name: CH_OMEGA1.into(),
                    samples: grid.iter().map(|&t| omega1(t)).collect(),
                },
                Channel {
                    name: CH_DELTA_OMEGA.into(),
                    samples: grid.iter().map(|&t| delta(t)).collect(),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn sample_hamiltonian_zero_waveform_is_drift() {
        let drift =
            HermitianOperator::new(sigma_z().map(|z| z * 0.5 * 1.0e4)).unwrap();
        let system = crate::pulse::ControlSystem::new(
            drift.clone(),
            vec![(
                CH_OMEGA1.into(),
                HermitianOperator::new(sigma_x().map(|z| z * 0.5)).unwrap(),
            )],
        )
        .unwrap();
        let wf = Waveform::new(
            1e-5,
            4,
            vec![Channel {
                name: CH_OMEGA1.into(),
                samples: vec![0.0; 5],
            }],
        )
        .unwrap();
        let track = sample_hamiltonian(&system, &wf).unwrap();
        for s in track.samples() {
            assert_eq!(s, drift.matrix());
        }
    }

    #[test]
    fn sample_hamiltonian_tanh_tan_at_zero() {
        let p = TanhTanParams::q1_optimal();
        let wf = tanh_tan(&p, 120e-6, 64).unwrap();
        let track = sample_hamiltonian(&single_qubit_system(), &wf).unwrap();
        let expected = sigma_z().map(|z| z * (p.amplitude / 2.0));
        assert!(frobenius_norm(&(&track.samples()[0] - expected)) < 1e-9);
    }

    #[test]
    fn sample_hamiltonian_two_qubit_guess_at_zero_is_diagonal() {
        let system = crate::entangler::build_system(209.4).unwrap();
        let wf = two_qubit_guess(64.0e3, 57.0e3, 78.5e3, 10e-3, 16).unwrap();
        let track = sample_hamiltonian(&system, &wf).unwrap();
        let h0 = &track.samples()[0];
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(h0[(i, j)].norm() < 1e-12);
                }
            }
        }
        let pi_j_half = std::f64::consts::PI * 209.4 / 2.0;
        assert_relative_eq!(
            h0[(0, 0)].re,
            (64.0e3 - 57.0e3) / 2.0 + pi_j_half,
            max_relative = 1e-12
        );
    }

    #[test]
    fn constant_hamiltonian_has_constant_frame_and_zero_inertial() {
        let wf = single_qubit_waveform(|_| 3.0e4, |_| 4.0e4, 1e-4, 32);
        let track = sample_hamiltonian(&single_qubit_system(), &wf).unwrap();
        let step = next_frame(&track).unwrap();
        for m in 0..=32 {
            assert_eq!(step.frame.vectors[m], step.frame.vectors[0]);
            assert_eq!(frobenius_norm(&step.frame.inertial[m]), 0.0);
        }
        assert!(step.frame.q_min.is_infinite());
        let seq = superadiabatic_q(&track, 3).unwrap();
        assert!(seq.q_super.is_infinite());
        assert_eq!(seq.peak_frame, 1);
    }

    #[test]
    fn frame_matches_analytic_two_level_diagonalization() {
        // H = ω₁σ_x/2 + Δωσ_z/2 diagonalizes by a rotation about y through
        // θ = atan2(ω₁, Δω); the ascending eigenvector columns are
        // (−sin θ/2, cos θ/2) and (cos θ/2, sin θ/2).
        let tau = 1e-4;
        let w = |t: f64| 8.0e4 * (std::f64::consts::PI * t / tau).sin();
        let d = |t: f64| 1.0e5 * (std::f64::consts::PI * t / tau).cos();
        let wf = single_qubit_waveform(w, d, tau, 256);
        let track = sample_hamiltonian(&single_qubit_system(), &wf).unwrap();
        let basis = diagonalizing_frame(&track).unwrap();
        for (m, &t) in track.times().iter().enumerate() {
            let theta = w(t).atan2(d(t));
            let (s, c) = (0.5 * theta).sin_cos();
            let v = &basis.vectors[m];
            assert!((v[(0, 0)].re - -s).abs() < 1e-9, "m={m}");
            assert!((v[(1, 0)].re - c).abs() < 1e-9);
            assert!((v[(0, 1)].re - c).abs() < 1e-9);
            assert!((v[(1, 1)].re - s).abs() < 1e-9);
            let omega = (w(t).powi(2) + d(t).powi(2)).sqrt();
            assert_relative_eq!(basis.values[m][0], -omega / 2.0, max_relative = 1e-10);
            assert_relative_eq!(basis.values[m][1], omega / 2.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn inertial_term_matches_analytic_theta_dot() {
        // C₁ = (θ̇/2)σ_y in the ascending-order frame basis, with
        // θ̇ = (ω̇₁Δω − ω₁Δω̇)/Ω².
        let tau = 1e-4;
        let n = 2048;
        let w0 = 8.0e4;
        let d0 = 1.0e5;
        let w = |t: f64| w0 * (std::f64::consts::PI * t / tau).sin();
        let d = |t: f64| d0 * (std::f64::consts::PI * t / tau).cos();
        let wdot = |t: f64| {
            w0 * std::f64::consts::PI / tau * (std::f64::consts::PI * t / tau).cos()
        };
        let ddot = |t: f64| {
            -d0 * std::f64::consts::PI / tau * (std::f64::consts::PI * t / tau).sin()
        };
        let wf = single_qubit_waveform(w, d, tau, n);
        let track = sample_hamiltonian(&single_qubit_system(), &wf).unwrap();
        let step = next_frame(&track).unwrap();
        for (m, &t) in track.times().iter().enumerate().skip(1).take(n - 1) {
            let omega_sq = w(t).powi(2) + d(t).powi(2);
            let theta_dot = (wdot(t) * d(t) - w(t) * ddot(t)) / omega_sq;
            let expected = sigma_y().map(|z| z * (theta_dot / 2.0));
            let err = frobenius_norm(&(&step.frame.inertial[m] - expected));
            assert!(
                err < 1e-4 * theta_dot.abs().max(1.0),
                "m={m} err={err:.3e} theta_dot={theta_dot:.3e}"
            );
        }
    }

    #[test]
    fn q_curve_constant_ratio() {
        let eps = 1e-3;
        let d: Vec<CMatrix> = (0..9).map(|_| sigma_z().map(|z| z * 0.5)).collect();
        let c: Vec<CMatrix> = (0..9).map(|_| sigma_y().map(|z| z * (eps / 2.0))).collect();
        let (curve, min) = q_curve(&d, &c);
        assert_eq!(curve.len(), 7);
        for q in &curve {
            assert_relative_eq!(*q, 1.0 / eps, max_relative = 1e-12);
        }
        assert_relative_eq!(min, 1.0 / eps, max_relative = 1e-12);
    }

    #[test]
    fn frame_one_diagonalizes_everywhere() {
        let wf = tanh_tan(&TanhTanParams::q1_optimal(), 120e-6, 256).unwrap();
        let track = sample_hamiltonian(&single_qubit_system(), &wf).unwrap();
        let step = next_frame(&track).unwrap();
        for m in 0..=256 {
            let d = &step.frame.diag[m];
            let off = (d[(0, 1)].norm_sqr() + d[(1, 0)].norm_sqr()).sqrt();
            assert!(off < 1e-9 * frobenius_norm(d), "m={m}");
        }
    }

    #[test]
    fn amplitude_scaling_leaves_inertial_unchanged() {
        let wf = single_qubit_waveform(
            |t| 5.0e4 * (1.0 + (2.0e4 * t).sin()),
            |t| 8.0e4 * (1.0 - 2.0 * t / 1e-4),
            1e-4,
            128,
        );
        let system = single_qubit_system();
        let track = sample_hamiltonian(&system, &wf).unwrap();
        let alpha = 2.7;
        let scaled = HamiltonianTrack::from_matrices(
            track.tau(),
            track.samples().iter().map(|h| h.map(|z| z * alpha)).collect(),
        )
        .unwrap();
        let base = next_frame(&track).unwrap();
        let big = next_frame(&scaled).unwrap();
        for m in 0..=128 {
            let err = frobenius_norm(&(&big.frame.inertial[m] - &base.frame.inertial[m]));
            let scale = frobenius_norm(&base.frame.inertial[m]).max(1.0);
            assert!(err < 1e-8 * scale, "m={m} err={err:.3e}");
        }
    }

    #[test]
    fn degenerate_guess_is_rejected() {
        // equal initial offsets on the two qubits give a degenerate H(0)
        let system = crate::entangler::build_system(209.4).unwrap();
        let n = 16;
        let mut wf = two_qubit_guess(64.0e3, 57.0e3, 78.5e3, 10e-3, n).unwrap();
        for m in 0..=n {
            let f = m as f64 / n as f64;
            wf.channel_mut(crate::pulse::CH_DELTA_OMEGA_B).unwrap()[m] =
                64.0e3 * (1.0 - f);
        }
        let track = sample_hamiltonian(&system, &wf).unwrap();
        assert!(matches!(
            diagonalizing_frame(&track),
            Err(Error::DegenerateSpectrum { .. })
        ));
        // fatal at frame 1
        assert!(superadiabatic_q(&track, 5).is_err());
    }

    #[test]
    fn streaming_q_matches_full_computation() {
        let wf = tanh_tan(&TanhTanParams::qs_optimal_120us(), 120e-6, 256).unwrap();
        let track = sample_hamiltonian(&single_qubit_system(), &wf).unwrap();
        for frame in 1..=3 {
            let seq = superadiabatic_q(&track, frame).unwrap();
            let full = seq.frames[frame - 1].q_min;
            let streamed = frame_q_min(&track, frame, None).unwrap().unwrap();
            assert_eq!(full, streamed, "frame {frame}");
        }
        // abort fires when the threshold is above the true minimum
        let q1 = frame_q_min(&track, 1, None).unwrap().unwrap();
        assert_eq!(frame_q_min(&track, 1, Some(q1 * 2.0)).unwrap(), None);
        assert_eq!(
            frame_q_min(&track, 1, Some(q1 * 0.5)).unwrap(),
            Some(q1)
        );
    }

    #[test]
    fn norm_preservation_under_frame_transformation() {
        let wf = tanh_tan(&TanhTanParams::q1_optimal(), 120e-6, 128).unwrap();
        let track = sample_hamiltonian(&single_qubit_system(), &wf).unwrap();
        let step = next_frame(&track).unwrap();
        for m in 1..128 {
            let h_next = &step.frame.diag[m] + &step.frame.inertial[m];
            assert_relative_eq!(
                frobenius_norm(&h_next),
                frobenius_norm(&(&step.frame.diag[m] + &step.frame.inertial[m])),
            );
            // ||D_n|| equals ||H_{n-1}|| by unitary invariance
            assert_relative_eq!(
                frobenius_norm(&step.frame.diag[m]),
                frobenius_norm(&track.samples()[m]),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn deviation_angles_trivial_cases() {
        let wf = single_qubit_waveform(|_| 6.0e4, |_| 8.0e4, 1e-4, 16);
        let track = sample_hamiltonian(&single_qubit_system(), &wf).unwrap();
        let seq = superadiabatic_q(&track, 1).unwrap();

        // eigenstate aligned with H (positive-eigenvalue column of V)
        let aligned = {
            let es = crate::linalg::eigh(
                &HermitianOperator::new(track.samples()[0].clone()).unwrap(),
            );
            crate::linalg::StateVector::new(es.vectors.column(1).into_owned()).unwrap()
        };
        let traj_aligned = crate::propagate::propagate(
            &single_qubit_system(),
            &wf,
            &aligned,
        )
        .unwrap();
        let dev = deviation_angles(&seq, &traj_aligned, &[1]).unwrap();
        for &a in &dev[0].angles {
            assert!(a < 1e-6, "alignment angle {a}");
        }

        // antiparallel Bloch vector: the opposite eigenstate
        let anti = {
            let es = crate::linalg::eigh(
                &HermitianOperator::new(track.samples()[0].clone()).unwrap(),
            );
            crate::linalg::StateVector::new(es.vectors.column(0).into_owned()).unwrap()
        };
        let traj_anti =
            crate::propagate::propagate(&single_qubit_system(), &wf, &anti).unwrap();
        let dev = deviation_angles(&seq, &traj_anti, &[1]).unwrap();
        for &a in &dev[0].angles {
            assert!((a - std::f64::consts::PI).abs() < 1e-6);
        }
    }

    #[test]
    fn identity_frame_for_pre_diagonal_track() {
        // a diagonal, non-degenerate, constant track keeps V = I
        let h = HermitianOperator::new(
            identity(2).map(|z| z * 2.0e4) + sigma_z().map(|z| z * 1.0e4),
        )
        .unwrap();
        let track =
            HamiltonianTrack::from_operators(1e-4, vec![h.clone(), h.clone(), h.clone(), h])
                .unwrap();
        let basis = diagonalizing_frame(&track).unwrap();
        for v in &basis.vectors {
            // columns ascending: |1⟩ then |0⟩
            assert!((v[(1, 0)].re - 1.0).abs() < 1e-12);
            assert!((v[(0, 1)].re - 1.0).abs() < 1e-12);
        }
    }
}
