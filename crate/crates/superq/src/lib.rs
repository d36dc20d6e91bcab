//! Superadiabatic Q-factor toolkit.
//!
//! Computes the iterated superadiabatic frame hierarchy of a time-dependent
//! control Hamiltonian, scores waveforms by their per-frame adiabatic
//! Q-factors, and optimizes pulse shapes against those scores: analytic
//! tanh/tan inversion pulses for a single qubit, and a derivative-free
//! evolutionary search that extends to a two-qubit adiabatic entangling
//! gate over a fixed σ_z⊗σ_z coupling.
//!
//! The crate is organized as:
//!
//! - [`linalg`]: complex dense linear algebra for d = 2, 4 Hermitian systems;
//! - [`pulse`]: waveforms, analytic pulse families, guess pulses, CSV I/O;
//! - [`propagate`]: piecewise-constant Schrödinger propagation;
//! - [`frames`]: the superadiabatic frame hierarchy and Q-factors;
//! - [`dynamics`]: fidelity sweeps, robustness scans, eigenvalue tracks;
//! - [`search`]: grid search and the evolutionary perturbation search;
//! - [`entangler`]: the two-qubit Bell-state transition scenario;
//! - [`report`]: CSV/JSON emitters.

pub mod dynamics;
pub mod entangler;
pub mod error;
pub mod frames;
pub mod linalg;
pub mod propagate;
pub mod pulse;
pub mod report;
pub mod search;

pub use error::{Error, Result};
