// Entangler fidelity curves, eigenvalue gaps, and the guess grid.

use superq::dynamics::{eigenvalue_tracks, fidelity_vs_length, linspace};
use superq::entangler::build_system;
use superq::frames::sample_hamiltonian;
use superq::linalg::StateVector;
use superq::pulse::two_qubit_guess;
use superq::search::{evolutionary_search, guess_grid_scan, Objective, SearchConfig};

fn main() {
    let system = build_system(209.4).unwrap();
    let tau = 10e-3;
    let n = 200;
    let guess = two_qubit_guess(64.0e3, 57.0e3, 78.5e3, tau, n).unwrap();

    let cfg = SearchConfig {
        objective: Objective::Frame(1),
        trials_per_radius: 10,
        rounds: 1,
        seed: 11,
        eps_max: vec![0.05 * 78.5e3],
        locked: vec![],
    };
    let out = evolutionary_search(&guess, &system, &cfg).unwrap();

    let track = sample_hamiltonian(&system, &out.waveform).unwrap();
    let tracks = eigenvalue_tracks(&track, Some(&StateVector::basis(4, 0))).unwrap();
    let pi_j = std::f64::consts::PI * 209.4;
    println!(
        "optimized min_gap = {:.3} rad/s  (0.1*piJ = {:.3}), start_trace = {:?}",
        tracks.min_gap,
        0.1 * pi_j,
        tracks.start_trace
    );
    let guess_track = sample_hamiltonian(&system, &guess).unwrap();
    let gt = eigenvalue_tracks(&guess_track, Some(&StateVector::basis(4, 0))).unwrap();
    println!("guess min_gap = {:.3} rad/s", gt.min_gap);

    let psi0 = StateVector::basis(4, 0);
    let bell = StateVector::bell();
    let taus: Vec<f64> = (1..=30).map(|k| k as f64 * 1.0e-3).collect();
    let gc = fidelity_vs_length(&guess, &system, &psi0, &bell, &taus, "guess").unwrap();
    let oc = fidelity_vs_length(&out.waveform, &system, &psi0, &bell, &taus, "opt").unwrap();
    println!("tau_ms  guess_infid  opt_infid  better");
    let mut opt_wins = 0;
    for (k, &t) in taus.iter().enumerate() {
        let better = if oc.infidelities[k] < gc.infidelities[k] {
            opt_wins += 1;
            "opt"
        } else {
            "guess"
        };
        println!(
            "{:5.1}  {:.4e}  {:.4e}  {better}",
            t * 1e3,
            gc.infidelities[k],
            oc.infidelities[k]
        );
    }
    println!("optimized wins {opt_wins}/{}", taus.len());

    // zero-length limit of the guess
    let zc = fidelity_vs_length(&guess, &system, &psi0, &bell, &[0.0], "guess").unwrap();
    println!("guess infidelity at tau=0: {}", zc.infidelities[0]);

    // guess grid over initial offsets (Fig. 8 style)
    let a_values = linspace(-100.0e3, 100.0e3, 21);
    let b_values = linspace(-100.0e3, 100.0e3, 21);
    let grid = guess_grid_scan(&a_values, &b_values, 78.5e3, 209.4, tau, 100).unwrap();
    println!("guess grid best: {:?}", grid.best);
    // print the row passing through b = -57k (j index of -60k due to grid)
    for (i, &a) in grid.dw_a0.iter().enumerate() {
        let row: Vec<String> = grid.q1[i]
            .iter()
            .map(|q| {
                if q.is_nan() {
                    "  nan".into()
                } else {
                    format!("{q:5.0}")
                }
            })
            .collect();
        println!("a={:7.0}: {}", a, row.join(" "));
    }
}
