// Scratch exploration of the frame structure and fidelity curves.

use superq::dynamics::{fidelity, fidelity_vs_length};
use superq::frames::{sample_hamiltonian, superadiabatic_q};
use superq::linalg::StateVector;
use superq::propagate::propagate;
use superq::pulse::{single_qubit_system, tanh_tan, TanhTanParams};

fn main() {
    let system = single_qubit_system();
    let tau = 120e-6;
    let n = 512;

    for (label, params) in [
        ("q1", TanhTanParams::q1_optimal()),
        ("qs120", TanhTanParams::qs_optimal_120us()),
        ("qs50", TanhTanParams::qs_optimal_50us()),
    ] {
        let wf = tanh_tan(&params, tau, n).unwrap();
        let track = sample_hamiltonian(&system, &wf).unwrap();
        let t0 = std::time::Instant::now();
        let seq = superadiabatic_q(&track, 10).unwrap();
        let dt = t0.elapsed();
        println!(
            "{label}: s={} Qs={:.4} truncated={} ({dt:?})",
            seq.peak_frame, seq.q_super, seq.truncated
        );
        println!("  Qn = {:?}", seq.q_factors().iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>());
    }

    // infidelity at 120us for both pulses, N convergence
    let psi0 = StateVector::basis(2, 0);
    let one = StateVector::basis(2, 1);
    for (label, params) in [
        ("q1", TanhTanParams::q1_optimal()),
        ("qs120", TanhTanParams::qs_optimal_120us()),
    ] {
        for n in [512usize, 1024, 2048, 4096] {
            let wf = tanh_tan(&params, tau, n).unwrap();
            let traj = propagate(&system, &wf, &psi0).unwrap();
            let (_, infid) = fidelity(traj.final_state(), &one).unwrap();
            print!("  {label} N={n}: infid={infid:.6e}");
        }
        println!();
    }

    // crossover of qs50 vs qs120 curves
    let taus: Vec<f64> = (1..=125).map(|k| k as f64 * 2.0e-6).collect();
    let wf50 = tanh_tan(&TanhTanParams::qs_optimal_50us(), 50e-6, 512).unwrap();
    let wf120 = tanh_tan(&TanhTanParams::qs_optimal_120us(), 120e-6, 512).unwrap();
    let c50 = fidelity_vs_length(&wf50, &system, &psi0, &one, &taus, "qs50").unwrap();
    let c120 = fidelity_vs_length(&wf120, &system, &psi0, &one, &taus, "qs120").unwrap();
    println!("tau_us  infid50      infid120     better");
    for (k, &t) in taus.iter().enumerate() {
        let b = if c50.infidelities[k] < c120.infidelities[k] { "50" } else { "120" };
        if t > 40e-6 && t < 130e-6 {
            println!(
                "{:6.1} {:.6e} {:.6e} {b}",
                t * 1e6,
                c50.infidelities[k],
                c120.infidelities[k]
            );
        }
    }

    // grid convergence of Q1
    for (label, params) in [
        ("q1", TanhTanParams::q1_optimal()),
        ("qs120", TanhTanParams::qs_optimal_120us()),
        ("qs50", TanhTanParams::qs_optimal_50us()),
    ] {
        let mut prev = None;
        for n in [512usize, 1024, 2048, 4096] {
            let wf = tanh_tan(&params, tau, n).unwrap();
            let track = sample_hamiltonian(&system, &wf).unwrap();
            let seq = superadiabatic_q(&track, 1).unwrap();
            let q1 = seq.frames[0].q_min;
            let rel = prev.map(|p: f64| ((q1 - p) / p).abs());
            println!("{label} N={n}: Q1={q1:.8} rel_change={rel:?}");
            prev = Some(q1);
        }
    }
}
