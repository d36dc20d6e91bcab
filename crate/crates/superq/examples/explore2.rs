// Scratch exploration of the evolutionary search paths.

use std::time::Instant;
use superq::dynamics::fidelity;
use superq::linalg::StateVector;
use superq::propagate::propagate;
use superq::pulse::{
    inversion_guess, single_qubit_system, tanh_tan, two_qubit_guess, TanhTanParams,
};
use superq::search::{evolutionary_search, Objective, SearchConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("inversion");

    if which == "inversion" {
        let system = single_qubit_system();
        let tau = 50e-6;
        let n = 128;
        let psi0 = StateVector::basis(2, 0);
        let one = StateVector::basis(2, 1);

        // reference: Qs-optimal tanh/tan at 50us
        let reference = tanh_tan(&TanhTanParams::qs_optimal_50us(), tau, n).unwrap();
        let traj = propagate(&system, &reference, &psi0).unwrap();
        let (_, ref_infid) = fidelity(traj.final_state(), &one).unwrap();
        println!("tanh/tan reference infidelity at 50us (N={n}): {ref_infid:.6e}");

        let guess = inversion_guess(80.0e3, 2.5e5, -2.5e5, tau, n).unwrap();
        let traj = propagate(&system, &guess, &psi0).unwrap();
        let (_, guess_infid) = fidelity(traj.final_state(), &one).unwrap();
        println!("guess infidelity: {guess_infid:.6e}");

        let t0 = Instant::now();
        let cfg1 = SearchConfig {
            objective: Objective::Frame(1),
            trials_per_radius: 10,
            rounds: 2,
            seed: 1,
            eps_max: vec![0.05 * 80.0e3],
            locked: vec![],
        };
        let stage1 = evolutionary_search(&guess, &system, &cfg1).unwrap();
        println!(
            "Q1 stage: {} -> {} in {:?} ({} accepts)",
            stage1.history[0],
            stage1.history.last().unwrap(),
            t0.elapsed(),
            stage1.accepted.len()
        );
        let traj = propagate(&system, &stage1.waveform, &psi0).unwrap();
        let (_, infid1) = fidelity(traj.final_state(), &one).unwrap();
        println!("after Q1 stage infidelity: {infid1:.6e}");

        let t0 = Instant::now();
        let cfg2 = SearchConfig {
            objective: Objective::Frame(2),
            rounds: 2,
            seed: 2,
            ..cfg1.clone()
        };
        let stage2 = evolutionary_search(&stage1.waveform, &system, &cfg2).unwrap();
        println!(
            "Q2 stage: {} -> {} in {:?} ({} accepts)",
            stage2.history[0],
            stage2.history.last().unwrap(),
            t0.elapsed(),
            stage2.accepted.len()
        );
        let traj = propagate(&system, &stage2.waveform, &psi0).unwrap();
        let (_, infid2) = fidelity(traj.final_state(), &one).unwrap();
        println!("after Q2 stage infidelity: {infid2:.6e}  (reference {ref_infid:.6e})");
    }

    if which == "entangler" {
        let system = superq::entangler::build_system(209.4).unwrap();
        let tau = 10e-3;
        let n = 200;
        let guess = two_qubit_guess(64.0e3, 57.0e3, 78.5e3, tau, n).unwrap();
        for rounds in [1usize, 3] {
            let cfg = SearchConfig {
                objective: Objective::Frame(1),
                trials_per_radius: 10,
                rounds,
                seed: 11,
                eps_max: vec![0.05 * 78.5e3],
                locked: vec![],
            };
            let t0 = Instant::now();
            let out = evolutionary_search(&guess, &system, &cfg).unwrap();
            println!(
                "entangler {rounds} round(s): Q1 {} -> {} in {:?} ({} accepts)",
                out.history[0],
                out.history.last().unwrap(),
                t0.elapsed(),
                out.accepted.len()
            );
        }
    }
}
