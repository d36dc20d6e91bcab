// Robustness scan checks at tau = 120 us.

use superq::dynamics::{linspace, robustness_scan};
use superq::linalg::StateVector;
use superq::pulse::{single_qubit_system, tanh_tan, TanhTanParams};

fn main() {
    let system = single_qubit_system();
    let tau = 120e-6;
    let n = 512;
    let psi0 = StateVector::basis(2, 0);
    let one = StateVector::basis(2, 1);

    let q1 = tanh_tan(&TanhTanParams::q1_optimal(), tau, n).unwrap();
    let qs = tanh_tan(&TanhTanParams::qs_optimal_120us(), tau, n).unwrap();

    let deltas = linspace(-140.0e3, 140.0e3, 141);
    let sigmas = linspace(0.0, 3.0, 151);

    let t0 = std::time::Instant::now();
    let g1 = robustness_scan(&q1, &system, &psi0, &one, &deltas, &sigmas).unwrap();
    let gs = robustness_scan(&qs, &system, &psi0, &one, &deltas, &sigmas).unwrap();
    println!("two full 141x151 scans in {:?}", t0.elapsed());

    // sigma sweep at delta = 0 (center row)
    let i0 = 70; // delta = 0
    let mut sigma_violations = 0;
    let mut infid_max: f64 = 0.0;
    for (j, &s) in sigmas.iter().enumerate() {
        if s > 0.8 && gs.fidelity[i0][j] < g1.fidelity[i0][j] {
            sigma_violations += 1;
            println!(
                "  sigma={s:.3}: qs {:.6} < q1 {:.6}",
                gs.fidelity[i0][j], g1.fidelity[i0][j]
            );
        }
        if s > 0.9 {
            let infid = 1.0 - gs.fidelity[i0][j] * gs.fidelity[i0][j];
            infid_max = infid_max.max(infid);
        }
    }
    println!("sigma>0.8 violations at delta=0: {sigma_violations}");
    println!("max qs infidelity for sigma>0.9 at delta=0: {infid_max:.4e}");

    // delta sweep at sigma = 1 (column j0 = 50)
    let j0 = 50;
    assert!((sigmas[j0] - 1.0).abs() < 1e-12);
    let mut delta_violations = 0;
    let mut worst = 0.0f64;
    for (i, &d) in deltas.iter().enumerate() {
        let diff = g1.fidelity[i][j0] - gs.fidelity[i][j0];
        if diff > 0.0 {
            delta_violations += 1;
            worst = worst.max(diff);
            if delta_violations < 8 {
                println!(
                    "  delta={d:.0}: qs {:.6} < q1 {:.6}",
                    gs.fidelity[i][j0], g1.fidelity[i][j0]
                );
            }
        }
    }
    println!("delta violations at sigma=1: {delta_violations} (worst diff {worst:.3e})");

    // full 2-D claim: sigma > 0.8, all delta
    let mut full_violations = 0;
    let mut worst2 = 0.0f64;
    for (i, _) in deltas.iter().enumerate() {
        for (j, &s) in sigmas.iter().enumerate() {
            if s > 0.8 {
                let diff = g1.fidelity[i][j] - gs.fidelity[i][j];
                if diff > 0.0 {
                    full_violations += 1;
                    worst2 = worst2.max(diff);
                }
            }
        }
    }
    println!("2-D sigma>0.8 violations: {full_violations} / {} (worst {worst2:.3e})", 141 * 110);
}
