// Hyperparameter scan for the numerical inversion search.

use std::time::Instant;
use superq::dynamics::fidelity;
use superq::linalg::StateVector;
use superq::propagate::propagate;
use superq::pulse::{inversion_guess, single_qubit_system, tanh_tan, TanhTanParams, Waveform};
use superq::search::{evolutionary_search, Objective, SearchConfig};

fn infid(system: &superq::pulse::ControlSystem, wf: &Waveform) -> f64 {
    let psi0 = StateVector::basis(2, 0);
    let one = StateVector::basis(2, 1);
    let traj = propagate(system, wf, &psi0).unwrap();
    fidelity(traj.final_state(), &one).unwrap().1
}

fn main() {
    let system = single_qubit_system();
    let tau = 50e-6;
    let n = 128;
    let reference = tanh_tan(&TanhTanParams::qs_optimal_50us(), tau, n).unwrap();
    let ref_infid = infid(&system, &reference);
    println!("reference: {ref_infid:.4e}");

    for (slope, eps_w, eps_d, r1, r2, seed) in [
        (2.5e5, 4.0e3, 12.0e3, 2, 4, 1u64),
        (2.5e5, 4.0e3, 4.0e3, 2, 6, 1),
        (1.5e5, 4.0e3, 8.0e3, 2, 4, 1),
        (4.0e5, 4.0e3, 16.0e3, 2, 4, 1),
    ] {
        let guess = inversion_guess(80.0e3, slope, -slope, tau, n).unwrap();
        let t0 = Instant::now();
        let cfg1 = SearchConfig {
            objective: Objective::Frame(1),
            trials_per_radius: 10,
            rounds: r1,
            seed,
            eps_max: vec![eps_w, eps_d],
            locked: vec![],
        };
        let s1 = evolutionary_search(&guess, &system, &cfg1).unwrap();
        let cfg2 = SearchConfig {
            objective: Objective::Frame(2),
            rounds: r2,
            seed: seed + 1,
            ..cfg1.clone()
        };
        let s2 = evolutionary_search(&s1.waveform, &system, &cfg2).unwrap();
        println!(
            "slope={slope:.1e} eps=({eps_w:.0},{eps_d:.0}) rounds=({r1},{r2}) seed={seed}: \
             Q1 {:.3}->{:.3}, Q2 {:.3}->{:.3}, infid {:.4e} vs ref {:.4e}  [{:?}]",
            s1.history[0],
            s1.history.last().unwrap(),
            s2.history[0],
            s2.history.last().unwrap(),
            infid(&system, &s2.waveform),
            ref_infid,
            t0.elapsed()
        );
    }
}
