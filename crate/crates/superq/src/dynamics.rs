//! Experiment harness: fidelity curves versus pulse length, robustness
//! scans over offset and amplitude errors, eigenvalue tracks, and the
//! diabatic reference gate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frames::{HamiltonianTrack, GAP_TOL};
use crate::linalg::{evolution_step, kron, sigma_x, sigma_y, sigma_z, StateVector};
use crate::propagate::propagate;
use crate::pulse::{ControlSystem, Waveform, CH_DELTA_OMEGA, CH_OMEGA1};

/// F = |⟨target|ψ⟩| and the infidelity 1 − F².
pub fn fidelity(psi: &StateVector, target: &StateVector) -> Result<(f64, f64)> {
    if psi.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            got: psi.dim(),
        });
    }
    let overlap = target.amplitudes().dotc(psi.amplitudes()).norm();
    Ok((overlap, 1.0 - overlap * overlap))
}

/// Infidelity of one pulse shape swept over pulse lengths.
#[derive(Debug, Clone)]
pub struct FidelityCurve {
    pub pulse_id: String,
    pub taus: Vec<f64>,
    pub infidelities: Vec<f64>,
}

/// Propagate a fixed pulse shape at each requested length by rescaling the
/// grid (samples unchanged, Δt = τ/N) and record the infidelity to the
/// target. τ = 0 evaluates the zero-time identity.
pub fn fidelity_vs_length(
    base: &Waveform,
    system: &ControlSystem,
    psi0: &StateVector,
    target: &StateVector,
    taus: &[f64],
    pulse_id: &str,
) -> Result<FidelityCurve> {
    let infidelities: Vec<f64> = taus
        .par_iter()
        .map(|&tau| -> Result<f64> {
            if tau == 0.0 {
                return Ok(fidelity(psi0, target)?.1);
            }
            let wf = base.rescaled(tau)?;
            let traj = propagate(system, &wf, psi0)?;
            Ok(fidelity(traj.final_state(), target)?.1)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(FidelityCurve {
        pulse_id: pulse_id.to_string(),
        taus: taus.to_vec(),
        infidelities,
    })
}

/// Fidelity over a grid of offset errors δ (added to Δω) and amplitude
/// scale factors σ (multiplying ω₁).
#[derive(Debug, Clone)]
pub struct RobustnessGrid {
    pub offsets: Vec<f64>,
    pub scales: Vec<f64>,
    /// fidelity[i][j] for (offsets[i], scales[j]).
    pub fidelity: Vec<Vec<f64>>,
}

/// Uniformly spaced scan values, inclusive of both ends.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|k| {
            let f = k as f64 / (count - 1) as f64;
            lo * (1.0 - f) + hi * f
        })
        .collect()
}

/// Propagate the modified pulses [Δω(t)+δ, σω₁(t)] over the scan grid.
pub fn robustness_scan(
    wf: &Waveform,
    system: &ControlSystem,
    psi0: &StateVector,
    target: &StateVector,
    offsets: &[f64],
    scales: &[f64],
) -> Result<RobustnessGrid> {
    let cells: Vec<(usize, usize)> = (0..offsets.len())
        .flat_map(|i| (0..scales.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| -> Result<f64> {
            let modified =
                wf.with_offset_and_scale(CH_DELTA_OMEGA, offsets[i], CH_OMEGA1, scales[j])?;
            let traj = propagate(system, &modified, psi0)?;
            Ok(fidelity(traj.final_state(), target)?.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut fidelity = vec![vec![0.0; scales.len()]; offsets.len()];
    for (k, &(i, j)) in cells.iter().enumerate() {
        fidelity[i][j] = values[k];
    }
    Ok(RobustnessGrid {
        offsets: offsets.to_vec(),
        scales: scales.to_vec(),
        fidelity,
    })
}

/// Sorted instantaneous eigenvalue traces of a track.
#[derive(Debug, Clone)]
pub struct EigenvalueTrack {
    pub times: Vec<f64>,
    /// traces[j][m]: j-th eigenvalue (ascending) at grid point m.
    pub traces: Vec<Vec<f64>>,
    /// Minimum adjacent-trace gap over the whole track.
    pub min_gap: f64,
    /// Ascending index of the trace the initial state belongs to, when an
    /// initial state is supplied.
    pub start_trace: Option<usize>,
}

/// Continuity-matched eigenvalue traces with the minimum spectral gap.
///
/// Fails with `DegenerateSpectrum` when any adjacent gap falls to the
/// degeneracy tolerance.
pub fn eigenvalue_tracks(
    track: &HamiltonianTrack,
    initial: Option<&StateVector>,
) -> Result<EigenvalueTrack> {
    let d = track.dim();
    let mut traces = vec![Vec::with_capacity(track.samples().len()); d];
    let mut min_gap = f64::INFINITY;
    let dt = track.dt();
    let mut start_trace = None;
    for (m, h) in track.samples().iter().enumerate() {
        let op = crate::linalg::HermitianOperator::new_unchecked(h.clone());
        let es = crate::linalg::eigh(&op);
        let spread = es.values[d - 1] - es.values[0];
        for j in 0..d {
            traces[j].push(es.values[j]);
            if j > 0 {
                let gap = es.values[j] - es.values[j - 1];
                if gap <= GAP_TOL * spread {
                    return Err(Error::DegenerateSpectrum {
                        time: m as f64 * dt,
                        gap,
                    });
                }
                min_gap = min_gap.min(gap);
            }
        }
        if m == 0 {
            if let Some(psi0) = initial {
                if psi0.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: psi0.dim(),
                    });
                }
                let mut best = 0;
                let mut best_mag = -1.0;
                for j in 0..d {
                    let mag = es.vectors.column(j).dotc(psi0.amplitudes()).norm();
                    if mag > best_mag {
                        best_mag = mag;
                        best = j;
                    }
                }
                start_trace = Some(best);
            }
        }
    }
    Ok(EigenvalueTrack {
        times: track.times(),
        traces,
        min_gap,
        start_trace,
    })
}

/// The idealized non-adiabatic entangling sequence: instantaneous π/2
/// rotations about +y on both qubits, free evolution under (πJ/2)σ_z⊗σ_z
/// for `delay` seconds, then an instantaneous π/2 rotation about +x on
/// qubit B. At delay = 1/2J this takes |00⟩ to the Bell state exactly.
pub fn diabatic_entangler(coupling_hz: f64, delay: f64) -> StateVector {
    let half = std::f64::consts::FRAC_PI_4;
    // exp(−i(π/4)σ_y) and exp(−i(π/4)σ_x)
    let ry = evolution_step(&sigma_y(), half);
    let rx = evolution_step(&sigma_x(), half);
    let ry_both = kron(&ry, &ry);
    let rx_b = kron(&crate::linalg::identity(2), &rx);
    let zz = kron(&sigma_z(), &sigma_z())
        .map(|z| z * (std::f64::consts::PI * coupling_hz / 2.0));
    let u_zz = evolution_step(&zz, delay);

    let psi0 = StateVector::basis(4, 0);
    let psi = &rx_b * (u_zz * (ry_both * psi0.amplitudes()));
    StateVector::new_unchecked(psi)
}

/// Infidelity of a resonant rectangular pulse of amplitude ω₁ and length τ:
/// 1 − sin²(ω₁τ/2). Reference oracle for the hard-pulse comparisons.
pub fn hard_pulse_infidelity(omega1: f64, tau: f64) -> f64 {
    let s = (omega1 * tau / 2.0).sin();
    1.0 - s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CVector, C64};
    use crate::pulse::{rectangular, single_qubit_system};
    use approx::assert_relative_eq;

    #[test]
    fn fidelity_basics() {
        let zero = StateVector::basis(2, 0);
        let one = StateVector::basis(2, 1);
        assert_eq!(fidelity(&zero, &zero).unwrap(), (1.0, 0.0));
        assert_eq!(fidelity(&zero, &one).unwrap(), (0.0, 1.0));
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let plus = StateVector::new(CVector::from_vec(vec![s, s])).unwrap();
        let (f, infid) = fidelity(&plus, &one).unwrap();
        assert_relative_eq!(f, std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(infid, 0.5, max_relative = 1e-14);
        assert!(fidelity(&plus, &StateVector::basis(4, 0)).is_err());
    }

    #[test]
    fn hard_pulse_matches_rabi_formula() {
        let omega1 = 80.0e3;
        let system = single_qubit_system();
        let base = rectangular(omega1, 39.27e-6, 32).unwrap();
        let taus: Vec<f64> = (0..=40).map(|k| k as f64 * 2.0e-6).collect();
        let curve = fidelity_vs_length(
            &base,
            &system,
            &StateVector::basis(2, 0),
            &StateVector::basis(2, 1),
            &taus,
            "hard",
        )
        .unwrap();
        for (k, &tau) in taus.iter().enumerate() {
            let expected = hard_pulse_infidelity(omega1, tau);
            assert!(
                (curve.infidelities[k] - expected).abs() < 1e-8,
                "tau={tau}: {} vs {expected}",
                curve.infidelities[k]
            );
        }
        // zero at the pi-pulse length
        let pi_tau = std::f64::consts::PI / omega1;
        let curve = fidelity_vs_length(
            &base,
            &system,
            &StateVector::basis(2, 0),
            &StateVector::basis(2, 1),
            &[pi_tau],
            "hard",
        )
        .unwrap();
        assert!(curve.infidelities[0] < 1e-10);
    }

    #[test]
    fn robustness_nominal_point_is_exact() {
        let system = single_qubit_system();
        let wf = crate::pulse::tanh_tan(
            &crate::pulse::TanhTanParams::q1_optimal(),
            60e-6,
            128,
        )
        .unwrap();
        let psi0 = StateVector::basis(2, 0);
        let one = StateVector::basis(2, 1);
        let traj = propagate(&system, &wf, &psi0).unwrap();
        let (f_plain, _) = fidelity(traj.final_state(), &one).unwrap();
        let grid =
            robustness_scan(&wf, &system, &psi0, &one, &[-1.0e4, 0.0], &[0.5, 1.0]).unwrap();
        assert_eq!(grid.fidelity[1][1], f_plain);
    }

    #[test]
    fn robustness_hard_pulse_scaling_oracle() {
        let omega1 = 80.0e3;
        let tau = std::f64::consts::PI / omega1;
        let system = single_qubit_system();
        let wf = rectangular(omega1, tau, 32).unwrap();
        let sigmas = [0.0, 0.3, 0.7, 1.0, 1.5, 2.0];
        let grid = robustness_scan(
            &wf,
            &system,
            &StateVector::basis(2, 0),
            &StateVector::basis(2, 1),
            &[0.0],
            &sigmas,
        )
        .unwrap();
        for (j, &sigma) in sigmas.iter().enumerate() {
            let expected = (sigma * std::f64::consts::FRAC_PI_2).sin().abs();
            assert!(
                (grid.fidelity[0][j] - expected).abs() < 1e-10,
                "sigma={sigma}"
            );
        }
    }

    #[test]
    fn diabatic_entangler_reaches_bell_at_half_j() {
        let j = 209.4;
        let psi = diabatic_entangler(j, 1.0 / (2.0 * j));
        let (f, _) = fidelity(&psi, &StateVector::bell()).unwrap();
        assert!(f >= 0.999, "F = {f}");

        let (f0, _) = fidelity(&diabatic_entangler(j, 0.0), &StateVector::bell()).unwrap();
        assert!(f0 < 1.0 - 1e-3, "zero-delay F = {f0}");

        // rescaling J and the delay together reproduces the same fidelity
        let (f2, _) =
            fidelity(&diabatic_entangler(2.0 * j, 1.0 / (4.0 * j)), &StateVector::bell())
                .unwrap();
        assert_relative_eq!(f, f2, max_relative = 1e-12);
    }

    #[test]
    fn eigenvalue_tracks_of_two_qubit_guess() {
        let system = crate::entangler::build_system(209.4).unwrap();
        let wf = crate::pulse::two_qubit_guess(64.0e3, 57.0e3, 78.5e3, 10e-3, 64).unwrap();
        let track = crate::frames::sample_hamiltonian(&system, &wf).unwrap();
        let tracks = eigenvalue_tracks(&track, Some(&StateVector::basis(4, 0))).unwrap();
        assert_eq!(tracks.traces.len(), 4);
        let pi_j_half = std::f64::consts::PI * 209.4 / 2.0;
        let mut expected_start = [
            (64.0e3 - 57.0e3) / 2.0 + pi_j_half,
            (64.0e3 + 57.0e3) / 2.0 - pi_j_half,
            (-64.0e3 - 57.0e3) / 2.0 - pi_j_half,
            (-64.0e3 + 57.0e3) / 2.0 + pi_j_half,
        ];
        expected_start.sort_by(f64::total_cmp);
        for j in 0..4 {
            assert_relative_eq!(tracks.traces[j][0], expected_start[j], max_relative = 1e-12);
        }
        // |00⟩ sits on the second-largest trace (ascending index 2 of 4)
        assert_eq!(tracks.start_trace, Some(2));
        // at t = τ one trace carries the Bell eigenvalue πJ/2
        let finals: Vec<f64> = tracks.traces.iter().map(|t| *t.last().unwrap()).collect();
        assert!(finals.iter().any(|&v| (v - pi_j_half).abs() < 1e-6));
        assert!(tracks.min_gap > 0.0);
    }
}
