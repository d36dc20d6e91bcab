//! Piecewise-constant Schrödinger propagation on the waveform grid.

use crate::error::{Error, Result};
use crate::linalg::{evolution_step, CMatrix, StateVector};
use crate::pulse::{ControlSystem, Waveform};

/// Propagated state samples ψ(mΔt) on the waveform grid.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    tau: f64,
    states: Vec<StateVector>,
}

impl StateTrajectory {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.states.len() - 1;
        let dt = self.tau / n as f64;
        (0..=n).map(|m| m as f64 * dt).collect()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("non-empty trajectory")
    }
}

pub(crate) fn control_samples<'a>(
    system: &'a ControlSystem,
    wf: &'a Waveform,
) -> Result<Vec<(&'a [f64], &'a CMatrix)>> {
    let mut pairs = Vec::with_capacity(wf.channels().len());
    for ch in wf.channels() {
        let op = system
            .control(&ch.name)
            .ok_or_else(|| Error::ChannelMismatch {
                channel: ch.name.clone(),
            })?;
        pairs.push((ch.samples.as_slice(), op.matrix()));
    }
    Ok(pairs)
}

/// Hamiltonian matrix H = H₀ + Σ_k u_k H_k for given channel values.
pub(crate) fn hamiltonian_at(
    system: &ControlSystem,
    pairs: &[(&[f64], &CMatrix)],
    value_of: impl Fn(&[f64]) -> f64,
) -> CMatrix {
    let mut h = system.drift().matrix().clone();
    for (samples, op) in pairs {
        let u = value_of(samples);
        if u != 0.0 {
            h.zip_apply(op, |x, o| *x += o * u);
        }
    }
    h
}

/// Piecewise-constant propagation ψ((m+1)Δt) = exp(−i H(t_mid) Δt) ψ(mΔt).
///
/// The controls are sampled at interval midpoints by averaging the two
/// adjacent grid samples. Every stored state is unit-norm to within the
/// accuracy of the spectral exponential.
pub fn propagate(
    system: &ControlSystem,
    wf: &Waveform,
    psi0: &StateVector,
) -> Result<StateTrajectory> {
    if psi0.dim() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: psi0.dim(),
        });
    }
    let pairs = control_samples(system, wf)?;
    let n = wf.n_steps();
    let dt = wf.dt();
    let mut states = Vec::with_capacity(n + 1);
    states.push(psi0.clone());
    let mut psi = psi0.amplitudes().clone();
    for m in 0..n {
        let h_mid = hamiltonian_at(system, &pairs, |s| 0.5 * (s[m] + s[m + 1]));
        let u = evolution_step(&h_mid, dt);
        psi = &u * psi;
        states.push(StateVector::new_unchecked(psi.clone()));
    }
    Ok(StateTrajectory {
        tau: wf.tau(),
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, identity, CVector, C64};
    use crate::pulse::{rectangular, single_qubit_system, Channel};
    use approx::assert_relative_eq;

    #[test]
    fn zero_hamiltonian_is_identity() {
        let system = single_qubit_system();
        let wf = Waveform::new(
            1e-5,
            8,
            vec![
                Channel {
                    name: crate::pulse::CH_OMEGA1.into(),
                    samples: vec![0.0; 9],
                },
                Channel {
                    name: crate::pulse::CH_DELTA_OMEGA.into(),
                    samples: vec![0.0; 9],
                },
            ],
        )
        .unwrap();
        let psi0 = StateVector::basis(2, 0);
        let traj = propagate(&system, &wf, &psi0).unwrap();
        for s in traj.states() {
            assert_eq!(s.amplitudes(), psi0.amplitudes());
        }
    }

    #[test]
    fn hard_pulse_inverts_at_pi_over_omega1() {
        let omega1 = 80.0e3;
        let tau = std::f64::consts::PI / omega1; // 39.27 us
        let system = single_qubit_system();
        let wf = rectangular(omega1, tau, 64).unwrap();
        let traj = propagate(&system, &wf, &StateVector::basis(2, 0)).unwrap();
        let overlap = traj.final_state().amplitudes()[1].norm();
        assert!((overlap - 1.0).abs() < 1e-10, "overlap {overlap}");
        assert_relative_eq!(tau, 39.27e-6, epsilon = 5e-9);
    }

    #[test]
    fn propagation_preserves_norm_and_step_unitarity() {
        let system = single_qubit_system();
        let wf = crate::pulse::tanh_tan(
            &crate::pulse::TanhTanParams::q1_optimal(),
            120e-6,
            256,
        )
        .unwrap();
        let amp = CVector::from_vec(vec![
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.8),
        ]);
        let traj = propagate(&system, &wf, &StateVector::new(amp).unwrap()).unwrap();
        for s in traj.states() {
            assert!((s.amplitudes().norm() - 1.0).abs() < 1e-10);
        }
        // spot-check a step operator
        let pairs = control_samples(&system, &wf).unwrap();
        let h = hamiltonian_at(&system, &pairs, |s| 0.5 * (s[17] + s[18]));
        let u = evolution_step(&h, wf.dt());
        assert!(frobenius_norm(&(u.adjoint() * &u - identity(2))) < 1e-10);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let system = single_qubit_system();
        let wf = rectangular(1.0, 1.0, 4).unwrap();
        let err = propagate(&system, &wf, &StateVector::basis(4, 0));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }
}
