//! Waveform representation, analytic pulse families, guess-pulse
//! constructors, and waveform file I/O.
//!
//! All channel samples are angular frequencies in rad/s on a uniform grid
//! of N intervals (N + 1 samples) spanning [0, τ].

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{sigma_x, sigma_z, HermitianOperator};

/// Rabi-amplitude channel of a single-qubit pulse.
pub const CH_OMEGA1: &str = "omega1";
/// Resonance-offset channel of a single-qubit pulse.
pub const CH_DELTA_OMEGA: &str = "delta_omega";
pub const CH_OMEGA1_A: &str = "omega1_a";
pub const CH_DELTA_OMEGA_A: &str = "delta_omega_a";
pub const CH_OMEGA1_B: &str = "omega1_b";
pub const CH_DELTA_OMEGA_B: &str = "delta_omega_b";

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    pub samples: Vec<f64>,
}

/// Sampled multi-channel control amplitudes u_k(mΔt), m = 0..=N.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    tau: f64,
    n_steps: usize,
    channels: Vec<Channel>,
}

impl Waveform {
    pub fn new(tau: f64, n_steps: usize, channels: Vec<Channel>) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParams {
                reason: format!("tau must be positive, got {tau}"),
            });
        }
        if n_steps < 2 {
            return Err(Error::InvalidParams {
                reason: format!("n_steps must be at least 2, got {n_steps}"),
            });
        }
        if channels.is_empty() {
            return Err(Error::InvalidParams {
                reason: "waveform needs at least one channel".into(),
            });
        }
        for ch in &channels {
            if ch.samples.len() != n_steps + 1 {
                return Err(Error::GridMismatch {
                    reason: format!(
                        "channel `{}` has {} samples, expected {}",
                        ch.name,
                        ch.samples.len(),
                        n_steps + 1
                    ),
                });
            }
        }
        Ok(Self {
            tau,
            n_steps,
            channels,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.tau / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.n_steps).map(|m| m as f64 * dt).collect()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.samples.as_slice())
    }

    pub fn channel_mut(&mut self, name: &str) -> Option<&mut Vec<f64>> {
        self.channels
            .iter_mut()
            .find(|c| c.name == name)
            .map(|c| &mut c.samples)
    }

    /// Same samples on a compressed or stretched grid: Δt' = tau'/N.
    pub fn rescaled(&self, tau: f64) -> Result<Self> {
        Self::new(tau, self.n_steps, self.channels.clone())
    }

    /// Modified copy with `delta` added to one channel and another channel
    /// multiplied by `scale`.
    pub fn with_offset_and_scale(
        &self,
        offset_channel: &str,
        delta: f64,
        scale_channel: &str,
        scale: f64,
    ) -> Result<Self> {
        let mut wf = self.clone();
        {
            let samples = wf
                .channel_mut(offset_channel)
                .ok_or_else(|| Error::ChannelMismatch {
                    channel: offset_channel.to_string(),
                })?;
            for s in samples.iter_mut() {
                *s += delta;
            }
        }
        {
            let samples = wf
                .channel_mut(scale_channel)
                .ok_or_else(|| Error::ChannelMismatch {
                    channel: scale_channel.to_string(),
                })?;
            for s in samples.iter_mut() {
                *s *= scale;
            }
        }
        Ok(wf)
    }

    /// Write the CSV format: a `# tau=<s> n_steps=<N>` header, a column
    /// header `t,<ch>,...`, then N+1 data rows with 17 significant digits.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!(
            "# tau={:.16e} n_steps={}\n",
            self.tau, self.n_steps
        ));
        out.push('t');
        for ch in &self.channels {
            out.push(',');
            out.push_str(&ch.name);
        }
        out.push('\n');
        let dt = self.dt();
        for m in 0..=self.n_steps {
            out.push_str(&format!("{:.16e}", m as f64 * dt));
            for ch in &self.channels {
                out.push_str(&format!(",{:.16e}", ch.samples[m]));
            }
            out.push('\n');
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();

        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "empty file".into(),
        })?;
        let header = header.strip_prefix('#').ok_or(Error::Parse {
            line: 1,
            reason: "missing `# tau=... n_steps=...` header".into(),
        })?;
        let mut tau = None;
        let mut n_steps = None;
        for field in header.split_whitespace() {
            if let Some(v) = field.strip_prefix("tau=") {
                tau = Some(v.parse::<f64>().map_err(|e| Error::Parse {
                    line: 1,
                    reason: format!("bad tau: {e}"),
                })?);
            } else if let Some(v) = field.strip_prefix("n_steps=") {
                n_steps = Some(v.parse::<usize>().map_err(|e| Error::Parse {
                    line: 1,
                    reason: format!("bad n_steps: {e}"),
                })?);
            }
        }
        let tau = tau.ok_or(Error::Parse {
            line: 1,
            reason: "header missing tau".into(),
        })?;
        let n_steps = n_steps.ok_or(Error::Parse {
            line: 1,
            reason: "header missing n_steps".into(),
        })?;

        let (_, columns) = lines.next().ok_or(Error::Parse {
            line: 2,
            reason: "missing column header".into(),
        })?;
        let names: Vec<&str> = columns.split(',').collect();
        if names.first() != Some(&"t") || names.len() < 2 {
            return Err(Error::Parse {
                line: 2,
                reason: "column header must start with `t` and name at least one channel".into(),
            });
        }
        let mut channels: Vec<Channel> = names[1..]
            .iter()
            .map(|n| Channel {
                name: n.to_string(),
                samples: Vec::with_capacity(n_steps + 1),
            })
            .collect();

        let dt = tau / n_steps as f64;
        let mut rows = 0usize;
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != names.len() {
                return Err(Error::GridMismatch {
                    reason: format!(
                        "line {}: expected {} fields, got {}",
                        idx + 1,
                        names.len(),
                        fields.len()
                    ),
                });
            }
            let t: f64 = fields[0].parse().map_err(|e| Error::Parse {
                line: idx + 1,
                reason: format!("bad time value: {e}"),
            })?;
            let expected_t = rows as f64 * dt;
            if (t - expected_t).abs() > 1e-9 * tau.max(f64::MIN_POSITIVE) {
                return Err(Error::GridMismatch {
                    reason: format!(
                        "line {}: time {t} deviates from the uniform grid point {expected_t}",
                        idx + 1
                    ),
                });
            }
            for (k, field) in fields[1..].iter().enumerate() {
                let v: f64 = field.parse().map_err(|e| Error::Parse {
                    line: idx + 1,
                    reason: format!("bad sample in column `{}`: {e}", names[k + 1]),
                })?;
                channels[k].samples.push(v);
            }
            rows += 1;
        }
        if rows == 0 {
            return Err(Error::Parse {
                line: 2,
                reason: "no data rows".into(),
            });
        }
        if rows != n_steps + 1 {
            return Err(Error::GridMismatch {
                reason: format!("expected {} data rows, got {rows}", n_steps + 1),
            });
        }
        Waveform::new(tau, n_steps, channels)
    }
}

/// Parameters of the tanh/tan analytic inversion pulse family.
///
/// `kappa` is the tan-sweep angle in radians; published parameter tables for
/// this family quote it in degrees (values above π/2 would otherwise sweep
/// the tangent across poles — see [`TanhTanParams::new_with_kappa_degrees`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhTanParams {
    /// Offset-sweep amplitude A, rad/s.
    pub amplitude: f64,
    /// Tangent sweep angle κ, radians.
    pub kappa: f64,
    /// tanh ramp rate ξ (dimensionless).
    pub xi: f64,
    /// Peak Rabi amplitude ω₁ᵐᵃˣ, rad/s.
    pub omega1_max: f64,
}

impl TanhTanParams {
    pub fn new(amplitude: f64, kappa: f64, xi: f64, omega1_max: f64) -> Result<Self> {
        if !(amplitude > 0.0 && kappa > 0.0 && xi > 0.0 && omega1_max > 0.0) {
            return Err(Error::InvalidParams {
                reason: format!(
                    "tanh/tan parameters must be strictly positive, got \
                     A={amplitude}, kappa={kappa}, xi={xi}, omega1_max={omega1_max}"
                ),
            });
        }
        Ok(Self {
            amplitude,
            kappa,
            xi,
            omega1_max,
        })
    }

    /// Construction from the tangent of the sweep angle, the form in which
    /// this pulse family is usually tabulated: κ = arctan(q) keeps the
    /// sweep on the principal branch for any q > 0.
    pub fn new_with_tan_kappa(
        amplitude: f64,
        tan_kappa: f64,
        xi: f64,
        omega1_max: f64,
    ) -> Result<Self> {
        Self::new(amplitude, tan_kappa.atan(), xi, omega1_max)
    }

    /// Parameters maximizing the first adiabatic Q-factor at ω₁ᵐᵃˣ = 80 krad/s.
    pub fn q1_optimal() -> Self {
        Self::new_with_tan_kappa(4.1e5, 6.9, 16.1, 80.0e3).unwrap()
    }

    /// Parameters maximizing the superadiabatic Q-factor for a 120 μs pulse.
    pub fn qs_optimal_120us() -> Self {
        Self::new_with_tan_kappa(50.5e5, 65.8, 49.2, 80.0e3).unwrap()
    }

    /// Parameters maximizing the superadiabatic Q-factor for a 50 μs pulse.
    pub fn qs_optimal_50us() -> Self {
        Self::new_with_tan_kappa(26.8e5, 36.3, 41.6, 80.0e3).unwrap()
    }
}

/// Sample a tanh/tan inversion pulse on a uniform grid.
///
/// First half (t ≤ τ/2): ω₁(t) = ω₁ᵐᵃˣ tanh(2ξt/τ),
/// Δω(t) = A tan(κ(1 − 2t/τ))/tan(κ). Second half by mirror symmetry:
/// ω₁(t) = ω₁(τ−t), Δω(t) = −Δω(τ−t), exact at mirrored sample pairs.
pub fn tanh_tan(params: &TanhTanParams, tau: f64, n_steps: usize) -> Result<Waveform> {
    TanhTanParams::new(params.amplitude, params.kappa, params.xi, params.omega1_max)?;
    let n = n_steps;
    let tan_kappa = params.kappa.tan();
    let mut omega1 = vec![0.0; n + 1];
    let mut delta = vec![0.0; n + 1];
    for m in 0..=n {
        if 2 * m <= n {
            let f = m as f64 / n as f64;
            omega1[m] = params.omega1_max * (2.0 * params.xi * f).tanh();
            delta[m] = params.amplitude * (params.kappa * (1.0 - 2.0 * f)).tan() / tan_kappa;
        } else {
            omega1[m] = omega1[n - m];
            delta[m] = -delta[n - m];
        }
    }
    Waveform::new(
        tau,
        n_steps,
        vec![
            Channel {
                name: CH_OMEGA1.into(),
                samples: omega1,
            },
            Channel {
                name: CH_DELTA_OMEGA.into(),
                samples: delta,
            },
        ],
    )
}

/// Guess pulse for single-qubit inversion: a linear offset ramp from
/// `dw_start` down through zero to `dw_end`, and a parabolic Rabi amplitude
/// with zeros at t = 0, τ and peak ω₁ᵐᵃˣ at t = τ/2.
pub fn inversion_guess(
    omega1_max: f64,
    dw_start: f64,
    dw_end: f64,
    tau: f64,
    n_steps: usize,
) -> Result<Waveform> {
    if !(dw_start > 0.0 && dw_end < 0.0) {
        return Err(Error::InvalidBoundary {
            reason: format!(
                "inversion requires dw_start > 0 > dw_end, got {dw_start} and {dw_end}"
            ),
        });
    }
    if !(omega1_max > 0.0) {
        return Err(Error::InvalidParams {
            reason: format!("omega1_max must be positive, got {omega1_max}"),
        });
    }
    let n = n_steps;
    let mut omega1 = vec![0.0; n + 1];
    let mut delta = vec![0.0; n + 1];
    for m in 0..=n {
        let f = m as f64 / n as f64;
        omega1[m] = omega1_max * 4.0 * f * (1.0 - f);
        delta[m] = dw_start * (1.0 - f) + dw_end * f;
    }
    Waveform::new(
        tau,
        n_steps,
        vec![
            Channel {
                name: CH_OMEGA1.into(),
                samples: omega1,
            },
            Channel {
                name: CH_DELTA_OMEGA.into(),
                samples: delta,
            },
        ],
    )
}

/// Linear guess pulse for the two-qubit entangling transition. All four
/// channels are linear in t: ω₁ᴬ 0 → −A, Δωᴬ α → 0, ω₁ᴮ 0 → +A, Δωᴮ −β → 0.
pub fn two_qubit_guess(
    alpha: f64,
    beta: f64,
    amplitude: f64,
    tau: f64,
    n_steps: usize,
) -> Result<Waveform> {
    if !(alpha > beta && beta > 0.0) {
        return Err(Error::InvalidBoundary {
            reason: format!("need alpha > beta > 0, got alpha={alpha}, beta={beta}"),
        });
    }
    if !(amplitude > 0.0) {
        return Err(Error::InvalidBoundary {
            reason: format!("amplitude must be positive, got {amplitude}"),
        });
    }
    let n = n_steps;
    let mut w1a = vec![0.0; n + 1];
    let mut dwa = vec![0.0; n + 1];
    let mut w1b = vec![0.0; n + 1];
    let mut dwb = vec![0.0; n + 1];
    for m in 0..=n {
        let f = m as f64 / n as f64;
        w1a[m] = -amplitude * f;
        dwa[m] = alpha * (1.0 - f);
        w1b[m] = amplitude * f;
        dwb[m] = -beta * (1.0 - f);
    }
    Waveform::new(
        tau,
        n_steps,
        vec![
            Channel {
                name: CH_OMEGA1_A.into(),
                samples: w1a,
            },
            Channel {
                name: CH_DELTA_OMEGA_A.into(),
                samples: dwa,
            },
            Channel {
                name: CH_OMEGA1_B.into(),
                samples: w1b,
            },
            Channel {
                name: CH_DELTA_OMEGA_B.into(),
                samples: dwb,
            },
        ],
    )
}

/// Resonant rectangular pulse: constant ω₁, zero offset.
pub fn rectangular(omega1: f64, tau: f64, n_steps: usize) -> Result<Waveform> {
    Waveform::new(
        tau,
        n_steps,
        vec![
            Channel {
                name: CH_OMEGA1.into(),
                samples: vec![omega1; n_steps + 1],
            },
            Channel {
                name: CH_DELTA_OMEGA.into(),
                samples: vec![0.0; n_steps + 1],
            },
        ],
    )
}

/// Drift plus named control operators: H(t) = H₀ + Σ_k u_k(t) H_k.
#[derive(Debug, Clone)]
pub struct ControlSystem {
    dim: usize,
    drift: HermitianOperator,
    controls: Vec<(String, HermitianOperator)>,
}

impl ControlSystem {
    pub fn new(drift: HermitianOperator, controls: Vec<(String, HermitianOperator)>) -> Result<Self> {
        let dim = drift.dim();
        for (name, op) in &controls {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: op.dim(),
                });
            }
            if name.is_empty() {
                return Err(Error::InvalidParams {
                    reason: "control channel name must be non-empty".into(),
                });
            }
        }
        Ok(Self {
            dim,
            drift,
            controls,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn drift(&self) -> &HermitianOperator {
        &self.drift
    }

    pub fn controls(&self) -> &[(String, HermitianOperator)] {
        &self.controls
    }

    pub fn control(&self, name: &str) -> Option<&HermitianOperator> {
        self.controls
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, op)| op)
    }
}

/// The single-qubit rotating-frame system H(t) = ω₁(t)σ_x/2 + Δω(t)σ_z/2.
pub fn single_qubit_system() -> ControlSystem {
    let zero = HermitianOperator::new_unchecked(crate::linalg::CMatrix::zeros(2, 2));
    let hx = HermitianOperator::new_unchecked(sigma_x().map(|z| z * 0.5));
    let hz = HermitianOperator::new_unchecked(sigma_z().map(|z| z * 0.5));
    ControlSystem::new(
        zero,
        vec![(CH_OMEGA1.into(), hx), (CH_DELTA_OMEGA.into(), hz)],
    )
    .expect("static system construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tanh_tan_endpoints_and_midpoint() {
        let p = TanhTanParams::q1_optimal();
        let tau = 120e-6;
        let wf = tanh_tan(&p, tau, 512).unwrap();
        let w1 = wf.channel(CH_OMEGA1).unwrap();
        let dw = wf.channel(CH_DELTA_OMEGA).unwrap();
        assert_eq!(w1[0], 0.0);
        assert_eq!(dw[0], p.amplitude);
        // midpoint sample (N even)
        assert_relative_eq!(w1[256], p.omega1_max * p.xi.tanh(), max_relative = 1e-14);
        assert_eq!(dw[256], 0.0);
    }

    #[test]
    fn tanh_tan_mirror_symmetry_is_exact() {
        let p = TanhTanParams::qs_optimal_120us();
        let wf = tanh_tan(&p, 120e-6, 511).unwrap();
        let w1 = wf.channel(CH_OMEGA1).unwrap();
        let dw = wf.channel(CH_DELTA_OMEGA).unwrap();
        let n = wf.n_steps();
        for m in 0..=n {
            assert_eq!(w1[m], w1[n - m]);
            assert_eq!(dw[m], -dw[n - m]);
        }
    }

    #[test]
    fn tanh_tan_q1_row_respects_amplitude_bound() {
        let p = TanhTanParams::q1_optimal();
        let wf = tanh_tan(&p, 120e-6, 512).unwrap();
        let w1 = wf.channel(CH_OMEGA1).unwrap();
        assert!(w1.iter().all(|&v| v <= 80.0e3 + 1e-9));
    }

    #[test]
    fn inversion_guess_boundaries() {
        let wf = inversion_guess(80.0e3, 2.5e5, -2.5e5, 50e-6, 128).unwrap();
        let w1 = wf.channel(CH_OMEGA1).unwrap();
        let dw = wf.channel(CH_DELTA_OMEGA).unwrap();
        assert_eq!(w1[0], 0.0);
        assert_eq!(w1[128], 0.0);
        assert_eq!(w1[64], 80.0e3);
        assert_eq!(dw[0], 2.5e5);
        assert_eq!(dw[128], -2.5e5);
        assert_relative_eq!(dw[64], 0.0, epsilon = 1e-9);
        assert!(inversion_guess(80.0e3, -1.0, -2.5e5, 50e-6, 128).is_err());
    }

    #[test]
    fn two_qubit_guess_boundaries() {
        let (alpha, beta, a) = (64.0e3, 57.0e3, 78.5e3);
        let wf = two_qubit_guess(alpha, beta, a, 10e-3, 200).unwrap();
        let at = |name: &str, m: usize| wf.channel(name).unwrap()[m];
        assert_eq!(at(CH_OMEGA1_A, 0), 0.0);
        assert_eq!(at(CH_DELTA_OMEGA_A, 0), alpha);
        assert_eq!(at(CH_OMEGA1_B, 0), 0.0);
        assert_eq!(at(CH_DELTA_OMEGA_B, 0), -beta);
        assert_eq!(at(CH_OMEGA1_A, 200), -a);
        assert_eq!(at(CH_DELTA_OMEGA_A, 200), 0.0);
        assert_eq!(at(CH_OMEGA1_B, 200), a);
        assert_eq!(at(CH_DELTA_OMEGA_B, 200), 0.0);
        assert!(matches!(
            two_qubit_guess(57.0e3, 57.0e3, a, 10e-3, 200),
            Err(Error::InvalidBoundary { .. })
        ));
    }

    #[test]
    fn waveform_csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pulse.csv");
        let wf = tanh_tan(&TanhTanParams::qs_optimal_50us(), 50e-6, 73).unwrap();
        wf.write_csv(&path).unwrap();
        let back = Waveform::read_csv(&path).unwrap();
        assert_eq!(wf, back);
    }

    #[test]
    fn waveform_csv_rejects_ragged_and_empty() {
        let dir = tempfile::tempdir().unwrap();

        let ragged = dir.path().join("ragged.csv");
        std::fs::write(
            &ragged,
            "# tau=1e-5 n_steps=2\nt,omega1\n0,1\n5e-6,2,99\n1e-5,3\n",
        )
        .unwrap();
        assert!(matches!(
            Waveform::read_csv(&ragged),
            Err(Error::GridMismatch { .. })
        ));

        let header_only = dir.path().join("header_only.csv");
        std::fs::write(&header_only, "# tau=1e-5 n_steps=2\nt,omega1\n").unwrap();
        assert!(matches!(
            Waveform::read_csv(&header_only),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn rescale_keeps_samples() {
        let wf = rectangular(80.0e3, 39.27e-6, 16).unwrap();
        let shorter = wf.rescaled(10e-6).unwrap();
        assert_eq!(shorter.tau(), 10e-6);
        assert_eq!(
            wf.channel(CH_OMEGA1).unwrap(),
            shorter.channel(CH_OMEGA1).unwrap()
        );
    }
}
