// Deviation angles and the hard-pulse upper bound.

use superq::dynamics::{fidelity_vs_length, hard_pulse_infidelity};
use superq::frames::{deviation_angles, sample_hamiltonian, superadiabatic_q};
use superq::linalg::StateVector;
use superq::propagate::propagate;
use superq::pulse::{single_qubit_system, tanh_tan, TanhTanParams};

fn main() {
    let system = single_qubit_system();
    let tau = 120e-6;
    let n = 512;
    let psi0 = StateVector::basis(2, 0);
    let one = StateVector::basis(2, 1);

    for (label, params) in [
        ("q1", TanhTanParams::q1_optimal()),
        ("qs120", TanhTanParams::qs_optimal_120us()),
    ] {
        let wf = tanh_tan(&params, tau, n).unwrap();
        let track = sample_hamiltonian(&system, &wf).unwrap();
        let seq = superadiabatic_q(&track, 10).unwrap();
        let s = seq.peak_frame;
        let traj = propagate(&system, &wf, &psi0).unwrap();
        let dev = deviation_angles(&seq, &traj, &[1, s]).unwrap();
        let max1 = dev[0].angles.iter().cloned().fold(0.0, f64::max);
        let maxs = dev
            .iter()
            .find(|d| d.frame == s)
            .unwrap()
            .angles
            .iter()
            .cloned()
            .fold(0.0, f64::max);
        println!("{label}: s={s} max alpha_1={max1:.4} rad, max alpha_s={maxs:.6} rad");
    }

    // adiabatic pulses never beat the hard pulse below the pi-pulse time
    let taus: Vec<f64> = (1..=39).map(|k| k as f64 * 1.0e-6).collect();
    for (label, params) in [
        ("q1", TanhTanParams::q1_optimal()),
        ("qs120", TanhTanParams::qs_optimal_120us()),
        ("qs50", TanhTanParams::qs_optimal_50us()),
    ] {
        let wf = tanh_tan(&params, 120e-6, n).unwrap();
        let curve = fidelity_vs_length(&wf, &system, &psi0, &one, &taus, label).unwrap();
        let mut worst = f64::NEG_INFINITY;
        for (k, &t) in taus.iter().enumerate() {
            let hard = hard_pulse_infidelity(80.0e3, t);
            // F_adiabatic <= F_hard + 1e-6  <=>  infid_ad >= infid_hard - ~2e-6
            worst = worst.max(hard - curve.infidelities[k]);
        }
        println!("{label}: max (hard_infid - adiabatic_infid) = {worst:.3e}");
    }
}
