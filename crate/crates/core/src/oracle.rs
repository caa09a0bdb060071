//! Semiclassical Monte-Carlo cross-check.
//!
//! Instead of pushing moment matrices through the network algebra, the oracle
//! draws Gaussian phase-space samples of the input sidebands (symmetrized,
//! vacuum half-quantum included), scatters each sample through the network
//! frequency by frequency, and evaluates the detector outputs per shot. The
//! two code paths share no propagation machinery, so agreement within the
//! standard error is a genuine consistency check.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::OpticalNetwork;
use crate::scalar::{cis, num, Real};
use crate::state::SidebandState;

/// Minimum accepted sample count.
pub const MIN_SAMPLES: usize = 10_000;

/// Samples per RNG stream. Fixed so results are bit-identical regardless of
/// thread count: chunk `i` always consumes stream `i` of the seeded ChaCha.
const CHUNK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub mean: T,
    pub std_err: T,
}

#[derive(Debug, Clone)]
pub struct OracleRun<T> {
    pub samples: usize,
    pub seed: u64,
    pub estimates: Vec<(String, Estimate<T>)>,
}

impl<T: Real> OracleRun<T> {
    pub fn get(&self, name: &str) -> Option<&Estimate<T>> {
        self.estimates
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Sum,
    Difference,
}

impl Sign {
    fn factor<T: Real>(self) -> T {
        match self {
            Sign::Sum => T::one(),
            Sign::Difference => -T::one(),
        }
    }
}

/// What the simulated detectors record on the network outputs. Quadrature
/// angles are relative to the carrier phase of the detected beam (dark beams
/// fall back to the absolute frame).
#[derive(Debug, Clone)]
pub enum OracleMeasurement<T> {
    Quadrature {
        name: String,
        beam: String,
        theta: T,
    },
    /// `X_a(ref_a + offset) +- X_b(ref_b + offset)`, two-output QNL.
    JointQuadrature {
        name: String,
        beam_a: String,
        beam_b: String,
        offset: T,
        sign: Sign,
    },
    /// Photocurrent fluctuation of one port (beams co-detected), own shot.
    Direct { name: String, beams: Vec<String> },
    /// Sum / difference photocurrent of two ports, combined shot.
    JointDirect {
        name: String,
        port_a: Vec<String>,
        port_b: Vec<String>,
        sign: Sign,
    },
}

impl<T> OracleMeasurement<T> {
    pub fn name(&self) -> &str {
        match self {
            Self::Quadrature { name, .. }
            | Self::JointQuadrature { name, .. }
            | Self::Direct { name, .. }
            | Self::JointDirect { name, .. } => name,
        }
    }
}

/// A measurement reduced to `z = |sum_r c_r a_r(+) + d_r conj(a_r(-))|^2 / norm`
/// over the output rail amplitudes.
struct CompiledForm<T> {
    c: Vec<Complex<T>>,
    d: Vec<Complex<T>>,
    norm: T,
}

struct Frame<T> {
    /// Output label to rail index.
    out_index: std::collections::HashMap<String, usize>,
    /// Carrier amplitude on each rail after the network.
    carriers: Vec<Complex<T>>,
    rails: usize,
}

impl<T: Real> Frame<T> {
    fn rail(&self, beam: &str) -> Result<usize> {
        self.out_index
            .get(beam)
            .copied()
            .ok_or_else(|| Error::UnknownBeam(beam.to_string()))
    }

    fn reference_phase(&self, beam: &str) -> Result<T> {
        let c = self.carriers[self.rail(beam)?];
        if c.norm_sqr() > T::zero() {
            Ok(c.im.atan2(c.re))
        } else {
            Ok(T::zero())
        }
    }

    fn quadrature_into(&self, form: &mut CompiledForm<T>, beam: &str, theta: T, weight: T) -> Result<()> {
        let r = self.rail(beam)?;
        let w = Complex::new(weight, T::zero());
        form.c[r] += cis(-theta) * w;
        form.d[r] += cis(theta) * w;
        Ok(())
    }

    /// Adds the photocurrent form of a port, returns its shot level.
    fn direct_into(&self, form: &mut CompiledForm<T>, beams: &[String], weight: T) -> Result<T> {
        let w = Complex::new(weight, T::zero());
        let mut shot = T::zero();
        for beam in beams {
            let r = self.rail(beam)?;
            let carrier = self.carriers[r];
            form.c[r] += carrier.conj() * w;
            form.d[r] += carrier * w;
            shot += carrier.norm_sqr();
        }
        Ok(shot)
    }

    fn compile(&self, m: &OracleMeasurement<T>) -> Result<CompiledForm<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut form = CompiledForm {
            c: vec![zero; self.rails],
            d: vec![zero; self.rails],
            norm: T::one(),
        };
        match m {
            OracleMeasurement::Quadrature { beam, theta, .. } => {
                let t = *theta + self.reference_phase(beam)?;
                self.quadrature_into(&mut form, beam, t, T::one())?;
            }
            OracleMeasurement::JointQuadrature {
                beam_a,
                beam_b,
                offset,
                sign,
                ..
            } => {
                let ta = *offset + self.reference_phase(beam_a)?;
                let tb = *offset + self.reference_phase(beam_b)?;
                self.quadrature_into(&mut form, beam_a, ta, T::one())?;
                self.quadrature_into(&mut form, beam_b, tb, sign.factor())?;
                form.norm = num::<T>(2.0);
            }
            OracleMeasurement::Direct { name, beams } => {
                let shot = self.direct_into(&mut form, beams, T::one())?;
                if shot <= T::zero() {
                    return Err(Error::ZeroCarrier(name.clone()));
                }
                form.norm = shot;
            }
            OracleMeasurement::JointDirect {
                name,
                port_a,
                port_b,
                sign,
            } => {
                let shot_a = self.direct_into(&mut form, port_a, T::one())?;
                let shot_b = self.direct_into(&mut form, port_b, sign.factor())?;
                if shot_a <= T::zero() || shot_b <= T::zero() {
                    return Err(Error::ZeroCarrier(name.clone()));
                }
                form.norm = shot_a + shot_b;
            }
        }
        Ok(form)
    }
}

/// Symmetric square root factor of a covariance matrix. Tiny negative
/// eigenvalues from round-off are clamped to zero.
fn covariance_factor<T: Real>(sigma: &DMatrix<T>) -> DMatrix<T> {
    let eig = sigma.clone().symmetric_eigen();
    let n = sigma.nrows();
    let mut factor = eig.eigenvectors;
    for k in 0..n {
        let s = if eig.eigenvalues[k] > T::zero() {
            eig.eigenvalues[k].sqrt()
        } else {
            T::zero()
        };
        for j in 0..n {
            factor[(j, k)] *= s;
        }
    }
    factor
}

/// Run the sampling oracle. `network = None` measures the state directly.
///
/// Deterministic for a given `(samples, seed)`: the sample stream is split
/// into fixed-size chunks, each tied to its own ChaCha stream, so serial and
/// parallel execution produce identical bits.
pub fn run_oracle<T: Real>(
    state: &SidebandState<T>,
    network: Option<&OpticalNetwork<T>>,
    measurements: &[OracleMeasurement<T>],
    cfg: &OracleConfig,
) -> Result<OracleRun<T>> {
    if cfg.samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples(cfg.samples));
    }

    let in_modes = 2 * state.beams().len();
    let factor = covariance_factor(&state.real_covariance());

    // rail geometry and scattering at the three relevant frequencies
    let omega = state.setup().omega;
    let (rails, s_plus, s_minus, beam_to_rail, frame) = match network {
        Some(net) => {
            let rails = net.total_rails();
            let mut map = vec![None; rails];
            for (b, beam) in state.beams().iter().enumerate() {
                let r = net.input_index(beam)?;
                map[r] = Some(b);
            }
            let s0 = net.scattering_matrix(T::zero());
            let mut carriers_in = DVector::from_element(rails, Complex::new(T::zero(), T::zero()));
            for beam in state.beams() {
                carriers_in[net.input_index(beam)?] = state.coherent(beam)?.carrier;
            }
            let carriers: Vec<Complex<T>> = (&s0 * &carriers_in).iter().copied().collect();
            let mut out_index = std::collections::HashMap::new();
            for (r, rail) in net.rails().iter().enumerate() {
                out_index.insert(rail.output.clone(), r);
            }
            (
                rails,
                net.scattering_matrix(omega),
                net.scattering_matrix(-omega),
                map,
                Frame {
                    out_index,
                    carriers,
                    rails,
                },
            )
        }
        None => {
            let rails = state.beams().len();
            let map = (0..rails).map(Some).collect();
            let eye = DMatrix::identity(rails, rails);
            let mut out_index = std::collections::HashMap::new();
            let mut carriers = Vec::with_capacity(rails);
            for (b, beam) in state.beams().iter().enumerate() {
                out_index.insert(beam.clone(), b);
                carriers.push(state.coherent(beam)?.carrier);
            }
            (
                rails,
                eye.clone(),
                eye,
                map,
                Frame {
                    out_index,
                    carriers,
                    rails,
                },
            )
        }
    };

    let forms: Vec<CompiledForm<T>> = measurements
        .iter()
        .map(|m| frame.compile(m))
        .collect::<Result<_>>()?;
    let n_meas = forms.len();

    let n_chunks = cfg.samples.div_ceil(CHUNK);
    let half = num::<T>(0.5);
    let zero_c = Complex::new(T::zero(), T::zero());

    // (sum z, sum z^2) per measurement per chunk, reduced in chunk order
    let partials: Vec<(Vec<T>, Vec<T>)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            rng.set_stream(chunk as u64);
            let len = CHUNK.min(cfg.samples - chunk * CHUNK);

            let mut sums = vec![T::zero(); n_meas];
            let mut sums2 = vec![T::zero(); n_meas];
            let mut g = DVector::zeros(2 * in_modes);
            let mut x = DVector::zeros(2 * in_modes);
            let mut a_plus = DVector::from_element(rails, zero_c);
            let mut a_minus = DVector::from_element(rails, zero_c);
            let mut out_plus = DVector::from_element(rails, zero_c);
            let mut out_minus = DVector::from_element(rails, zero_c);

            for _ in 0..len {
                for j in 0..2 * in_modes {
                    g[j] = T::standard_normal(&mut rng);
                }
                factor.mul_to(&g, &mut x);
                for r in 0..rails {
                    match beam_to_rail[r] {
                        Some(b) => {
                            let up = 2 * b;
                            let lo = 2 * b + 1;
                            a_plus[r] = Complex::new(x[up], x[in_modes + up]);
                            a_minus[r] = Complex::new(x[lo], x[in_modes + lo]);
                        }
                        None => {
                            // unconnected rail: fresh vacuum, Var(Re) = 1/4
                            a_plus[r] = Complex::new(
                                half * T::standard_normal(&mut rng),
                                half * T::standard_normal(&mut rng),
                            );
                            a_minus[r] = Complex::new(
                                half * T::standard_normal(&mut rng),
                                half * T::standard_normal(&mut rng),
                            );
                        }
                    }
                }
                s_plus.mul_to(&a_plus, &mut out_plus);
                s_minus.mul_to(&a_minus, &mut out_minus);

                for (i, form) in forms.iter().enumerate() {
                    let mut xq = zero_c;
                    for r in 0..rails {
                        xq += form.c[r] * out_plus[r] + form.d[r] * out_minus[r].conj();
                    }
                    let z = xq.norm_sqr() / form.norm;
                    sums[i] += z;
                    sums2[i] += z * z;
                }
            }
            (sums, sums2)
        })
        .collect();

    let n_t = num::<T>(cfg.samples as f64);
    let mut estimates = Vec::with_capacity(n_meas);
    for (i, m) in measurements.iter().enumerate() {
        let mut s = T::zero();
        let mut s2 = T::zero();
        for p in &partials {
            s += p.0[i];
            s2 += p.1[i];
        }
        let mean = s / n_t;
        let mut var_z = s2 / n_t - mean * mean;
        if var_z < T::zero() {
            var_z = T::zero();
        }
        estimates.push((
            m.name().to_string(),
            Estimate {
                mean,
                std_err: (var_z / n_t).sqrt(),
            },
        ));
    }

    Ok(OracleRun {
        samples: cfg.samples,
        seed: cfg.seed,
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::AnalysisSetup;
    use crate::umzi::{build_umzi_network, Lock, UmziConfig};
    use approx::assert_relative_eq;

    const V4_PLUS: f64 = 0.3981071705534972;
    const V4_MINUS: f64 = 2.5118864315095797;

    fn setup() -> AnalysisSetup<f64> {
        AnalysisSetup::separation_point(
            2.0 * std::f64::consts::PI * 10.25e6,
            std::f64::consts::FRAC_PI_2,
        )
        .unwrap()
    }

    fn quad(name: &str, beam: &str, theta: f64) -> OracleMeasurement<f64> {
        OracleMeasurement::Quadrature {
            name: name.into(),
            beam: beam.into(),
            theta,
        }
    }

    #[test]
    fn vacuum_quadrature_is_shot_noise() {
        let state = SidebandState::<f64>::vacuum(["a"], setup());
        let run = run_oracle(
            &state,
            None,
            &[quad("x", "a", 0.0), quad("y", "a", 1.234)],
            &OracleConfig {
                samples: 40_000,
                seed: 7,
            },
        )
        .unwrap();
        for (_, e) in &run.estimates {
            assert!((e.mean - 1.0).abs() < 5.0 * e.std_err, "mean {}", e.mean);
            // |X|^2 of a complex Gaussian has variance ~ mean^2
            let expected_se = (2.0f64 / 40_000.0).sqrt();
            assert!(e.std_err > 0.3 * expected_se && e.std_err < 3.0 * expected_se);
        }
    }

    #[test]
    fn squeezed_quadratures_match_closed_form() {
        let state = SidebandState::squeezed("a", V4_PLUS, V4_MINUS, setup()).unwrap();
        let run = run_oracle(
            &state,
            None,
            &[
                quad("plus", "a", 0.0),
                quad("minus", "a", std::f64::consts::FRAC_PI_2),
            ],
            &OracleConfig {
                samples: 100_000,
                seed: 21,
            },
        )
        .unwrap();
        let p = run.get("plus").unwrap();
        let m = run.get("minus").unwrap();
        assert!((p.mean - V4_PLUS).abs() < 5.0 * p.std_err);
        assert!((m.mean - V4_MINUS).abs() < 5.0 * m.std_err);
    }

    #[test]
    fn network_direct_currents_match_analytic_path() {
        let state = SidebandState::squeezed("in", V4_PLUS, V4_MINUS, setup())
            .unwrap()
            .with_carrier("in", num_complex::Complex::new(3.0, 0.0))
            .unwrap();
        let cfg = UmziConfig::new(setup().tau, Lock::PlusHalfPi, 1.0).unwrap();
        let umzi = build_umzi_network(&cfg).unwrap();

        let out = umzi.network.propagate(&state).unwrap();
        let (sum_an, diff_an) =
            crate::detection::joint_direct(&out, &["out1"], &["out2"]).unwrap();

        let run = run_oracle(
            &state,
            Some(&umzi.network),
            &[
                OracleMeasurement::JointDirect {
                    name: "sum".into(),
                    port_a: vec!["out1".into()],
                    port_b: vec!["out2".into()],
                    sign: Sign::Sum,
                },
                OracleMeasurement::JointDirect {
                    name: "diff".into(),
                    port_a: vec!["out1".into()],
                    port_b: vec!["out2".into()],
                    sign: Sign::Difference,
                },
            ],
            &OracleConfig {
                samples: 200_000,
                seed: 3,
            },
        )
        .unwrap();

        let s = run.get("sum").unwrap();
        let d = run.get("diff").unwrap();
        assert!(
            (s.mean - sum_an.value_linear).abs() < 5.0 * s.std_err,
            "sum: oracle {} vs analytic {}",
            s.mean,
            sum_an.value_linear
        );
        assert!((d.mean - diff_an.value_linear).abs() < 5.0 * d.std_err);
        // sideband separation turns squeezing into sub-QNL sum current
        assert_relative_eq!(sum_an.value_linear, (V4_PLUS + 1.0) / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn identical_seeds_reproduce_bit_for_bit() {
        let state = SidebandState::squeezed("a", V4_PLUS, V4_MINUS, setup()).unwrap();
        let meas = [quad("x", "a", 0.3)];
        let cfg = OracleConfig {
            samples: 20_000,
            seed: 99,
        };
        let a = run_oracle(&state, None, &meas, &cfg).unwrap();
        let b = run_oracle(&state, None, &meas, &cfg).unwrap();
        assert_eq!(a.estimates[0].1.mean.to_bits(), b.estimates[0].1.mean.to_bits());
        assert_eq!(
            a.estimates[0].1.std_err.to_bits(),
            b.estimates[0].1.std_err.to_bits()
        );

        let c = run_oracle(
            &state,
            None,
            &meas,
            &OracleConfig {
                samples: 20_000,
                seed: 100,
            },
        )
        .unwrap();
        assert_ne!(a.estimates[0].1.mean.to_bits(), c.estimates[0].1.mean.to_bits());
    }

    #[test]
    fn standard_error_shrinks_like_sqrt_n() {
        let state = SidebandState::<f64>::vacuum(["a"], setup());
        let meas = [quad("x", "a", 0.0)];
        let small = run_oracle(
            &state,
            None,
            &meas,
            &OracleConfig {
                samples: 10_000,
                seed: 5,
            },
        )
        .unwrap();
        let large = run_oracle(
            &state,
            None,
            &meas,
            &OracleConfig {
                samples: 160_000,
                seed: 5,
            },
        )
        .unwrap();
        let ratio = small.estimates[0].1.std_err / large.estimates[0].1.std_err;
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
    }

    #[test]
    fn rejects_tiny_sample_counts() {
        let state = SidebandState::<f64>::vacuum(["a"], setup());
        assert!(matches!(
            run_oracle(
                &state,
                None,
                &[quad("x", "a", 0.0)],
                &OracleConfig {
                    samples: 9_999,
                    seed: 0
                }
            ),
            Err(Error::TooFewSamples(9_999))
        ));
    }
}
