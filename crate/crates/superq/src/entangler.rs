//! The two-qubit control system with a fixed σ_z⊗σ_z coupling, its boundary
//! Hamiltonians, and the |00⟩ → Bell-state adiabatic transition scenario.

use crate::dynamics::{eigenvalue_tracks, fidelity_vs_length, EigenvalueTrack, FidelityCurve};
use crate::error::{Error, Result};
use crate::frames::{sample_hamiltonian, GAP_TOL};
use crate::linalg::{eigh, identity, kron, sigma_x, sigma_z, HermitianOperator, StateVector};
use crate::pulse::{
    two_qubit_guess, ControlSystem, Waveform, CH_DELTA_OMEGA_A, CH_DELTA_OMEGA_B, CH_OMEGA1_A,
    CH_OMEGA1_B,
};
use crate::search::{evolutionary_search, SearchConfig, SearchOutcome};

/// Boundary parameters of the entangling transition. All rates in rad/s
/// except the coupling, which follows the NMR convention of Hz.
#[derive(Debug, Clone, Copy)]
pub struct TwoQubitBoundary {
    /// Δωᴬ(0) = α > 0.
    pub alpha: f64,
    /// −Δωᴮ(0) = β > 0.
    pub beta: f64,
    /// |ω₁(τ)| = A on both qubits.
    pub amplitude: f64,
    /// J coupling in Hz.
    pub coupling_hz: f64,
}

impl TwoQubitBoundary {
    /// The scenario of the reference experiment: α = 64 krad/s,
    /// β = 57 krad/s, A = 78.5 krad/s, J = 209.4 Hz.
    pub fn reference() -> Self {
        Self {
            alpha: 64.0e3,
            beta: 57.0e3,
            amplitude: 78.5e3,
            coupling_hz: 209.4,
        }
    }

    /// πJ in rad/s, the energy scale of the coupling term.
    pub fn coupling_scale(&self) -> f64 {
        std::f64::consts::PI * self.coupling_hz
    }

    /// α > β > 0, both above the coupling scale, and A above the coupling
    /// scale; these orderings keep |00⟩ and the Bell state pinned to the
    /// second-largest eigenvalue at the boundaries.
    pub fn validate(&self) -> Result<()> {
        if !(self.coupling_hz > 0.0) {
            return Err(Error::InvalidCoupling {
                reason: format!("coupling must be positive, got {} Hz", self.coupling_hz),
            });
        }
        let scale = self.coupling_scale();
        if !(self.alpha > self.beta && self.beta > 0.0) {
            return Err(Error::InvalidBoundary {
                reason: format!(
                    "need alpha > beta > 0, got alpha={}, beta={}",
                    self.alpha, self.beta
                ),
            });
        }
        if self.beta <= scale {
            return Err(Error::InvalidBoundary {
                reason: format!(
                    "offsets must exceed the coupling scale {scale:.1} rad/s"
                ),
            });
        }
        if self.amplitude <= scale {
            return Err(Error::InvalidBoundary {
                reason: format!(
                    "amplitude must exceed the coupling scale {scale:.1} rad/s"
                ),
            });
        }
        Ok(())
    }
}

/// Drift H₀ = (πJ/2)σ_z⊗σ_z with the four single-qubit controls
/// ω₁ᴬσ_x⊗𝟙/2, Δωᴬσ_z⊗𝟙/2, ω₁ᴮ𝟙⊗σ_x/2, Δωᴮ𝟙⊗σ_z/2.
pub fn build_system(coupling_hz: f64) -> Result<ControlSystem> {
    if !(coupling_hz > 0.0) {
        return Err(Error::InvalidCoupling {
            reason: format!("coupling must be positive, got {coupling_hz} Hz"),
        });
    }
    let eye = identity(2);
    let drift = HermitianOperator::new_unchecked(
        kron(&sigma_z(), &sigma_z())
            .map(|z| z * (std::f64::consts::PI * coupling_hz / 2.0)),
    );
    let half = |m: crate::linalg::CMatrix| HermitianOperator::new_unchecked(m.map(|z| z * 0.5));
    ControlSystem::new(
        drift,
        vec![
            (CH_OMEGA1_A.into(), half(kron(&sigma_x(), &eye))),
            (CH_DELTA_OMEGA_A.into(), half(kron(&sigma_z(), &eye))),
            (CH_OMEGA1_B.into(), half(kron(&eye, &sigma_x()))),
            (CH_DELTA_OMEGA_B.into(), half(kron(&eye, &sigma_z()))),
        ],
    )
}

fn boundary_hamiltonian(
    system: &ControlSystem,
    w1a: f64,
    dwa: f64,
    w1b: f64,
    dwb: f64,
) -> HermitianOperator {
    let mut m = system.drift().matrix().clone();
    let add = |m: &mut crate::linalg::CMatrix, name: &str, u: f64, system: &ControlSystem| {
        let op = system.control(name).expect("two-qubit control");
        m.zip_apply(op.matrix(), |x, o| *x += o * u);
    };
    add(&mut m, CH_OMEGA1_A, w1a, system);
    add(&mut m, CH_DELTA_OMEGA_A, dwa, system);
    add(&mut m, CH_OMEGA1_B, w1b, system);
    add(&mut m, CH_DELTA_OMEGA_B, dwb, system);
    HermitianOperator::new_unchecked(m)
}

/// Descending-order rank (1-based) of the eigenvector with maximal overlap
/// against `state`, plus that overlap.
fn rank_of_state(h: &HermitianOperator, state: &StateVector) -> Result<(usize, f64)> {
    let es = eigh(h);
    let d = es.values.len();
    let spread = es.values[d - 1] - es.values[0];
    for k in 1..d {
        let gap = es.values[k] - es.values[k - 1];
        if gap <= GAP_TOL * spread {
            return Err(Error::DegenerateSpectrum { time: 0.0, gap });
        }
    }
    let mut best = 0;
    let mut best_mag = -1.0;
    for j in 0..d {
        let mag = es.vectors.column(j).dotc(state.amplitudes()).norm();
        if mag > best_mag {
            best_mag = mag;
            best = j;
        }
    }
    // ascending index d−1 is rank 1 in descending order
    Ok((d - best, best_mag))
}

/// Verify that |00⟩ is the eigenvector of H(0) with the second-largest
/// eigenvalue; returns the descending rank (2 on success).
pub fn initial_state_check(boundary: &TwoQubitBoundary) -> Result<usize> {
    let system = build_system(boundary.coupling_hz)?;
    let h0 = boundary_hamiltonian(&system, 0.0, boundary.alpha, 0.0, -boundary.beta);
    let (rank, _) = rank_of_state(&h0, &StateVector::basis(4, 0))?;
    if rank != 2 {
        return Err(Error::OrderingViolation {
            expected: 2,
            got: rank,
        });
    }
    Ok(rank)
}

/// Verify that the Bell state (|00⟩+|11⟩)/√2 is an eigenvector of H(τ)
/// with eigenvalue πJ/2 and descending rank 2; returns (overlap, rank).
pub fn target_state_check(boundary: &TwoQubitBoundary) -> Result<(f64, usize)> {
    let system = build_system(boundary.coupling_hz)?;
    let h_tau = boundary_hamiltonian(
        &system,
        -boundary.amplitude,
        0.0,
        boundary.amplitude,
        0.0,
    );
    let bell = StateVector::bell();

    // H(τ)·bell must equal (πJ/2)·bell: the A-dependent terms cancel.
    let expected = std::f64::consts::PI * boundary.coupling_hz / 2.0;
    let applied = h_tau.matrix() * bell.amplitudes();
    let residue = (&applied - bell.amplitudes().map(|z| z * expected)).norm();
    if residue > 1e-9 * expected.abs().max(1.0) {
        return Err(Error::InvalidBoundary {
            reason: format!("Bell state is not an H(τ) eigenvector (residue {residue:.3e})"),
        });
    }

    let (rank, overlap) = rank_of_state(&h_tau, &bell)?;
    if rank != 2 {
        return Err(Error::OrderingViolation {
            expected: 2,
            got: rank,
        });
    }
    if overlap < 1.0 - 1e-10 {
        return Err(Error::InvalidBoundary {
            reason: format!("Bell overlap {overlap} below tolerance"),
        });
    }
    Ok((overlap, rank))
}

/// Everything produced by one entangler run.
pub struct EntanglerRun {
    pub system: ControlSystem,
    pub guess: Waveform,
    pub search: SearchOutcome,
    pub guess_curve: FidelityCurve,
    pub optimized_curve: FidelityCurve,
    pub tracks: EigenvalueTrack,
}

/// Build the linear guess, maximize Q₁ with the evolutionary search (Q₁
/// scales linearly with pulse length, so any search length serves), then
/// sweep the Bell-state infidelity over `curve_taus` and extract the
/// eigenvalue traces of the optimized pulse.
pub fn run_entangler(
    boundary: &TwoQubitBoundary,
    tau: f64,
    n_steps: usize,
    cfg: &SearchConfig,
    curve_taus: &[f64],
) -> Result<EntanglerRun> {
    boundary.validate()?;
    initial_state_check(boundary)?;
    target_state_check(boundary)?;

    let system = build_system(boundary.coupling_hz)?;
    let guess = two_qubit_guess(
        boundary.alpha,
        boundary.beta,
        boundary.amplitude,
        tau,
        n_steps,
    )?;
    let search = evolutionary_search(&guess, &system, cfg)?;

    let psi0 = StateVector::basis(4, 0);
    let bell = StateVector::bell();
    let guess_curve = fidelity_vs_length(&guess, &system, &psi0, &bell, curve_taus, "guess")?;
    let optimized_curve = fidelity_vs_length(
        &search.waveform,
        &system,
        &psi0,
        &bell,
        curve_taus,
        "optimized",
    )?;
    let track = sample_hamiltonian(&system, &search.waveform)?;
    let tracks = eigenvalue_tracks(&track, Some(&psi0))?;

    Ok(EntanglerRun {
        system,
        guess,
        search,
        guess_curve,
        optimized_curve,
        tracks,
    })
}
