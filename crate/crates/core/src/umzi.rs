//! The device under study: an unbalanced Mach-Zehnder interferometer that
//! splits the +-Omega sidebands of one beam into two spatial beams.
//!
//! Provides both the closed-form output variances and a network model whose
//! propagation reproduces them; the agreement of the two routes is the
//! module's central self-consistency check.

use crate::error::{Error, Result};
use crate::network::OpticalNetwork;
use crate::scalar::{num, Real};

/// Lock setpoint of the carrier phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lock<T> {
    PlusHalfPi,
    MinusHalfPi,
    Custom(T),
}

impl<T: Real> Lock<T> {
    pub fn phi(&self) -> T {
        match self {
            Lock::PlusHalfPi => T::frac_pi_2(),
            Lock::MinusHalfPi => -T::frac_pi_2(),
            Lock::Custom(phi) => *phi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmziConfig<T> {
    /// Arm delay, seconds.
    pub tau: T,
    pub lock: Lock<T>,
    /// Fringe visibility in [0, 1]; the mode-matching efficiency is its square.
    pub visibility: T,
}

impl<T: Real> UmziConfig<T> {
    pub fn new(tau: T, lock: Lock<T>, visibility: T) -> Result<Self> {
        if tau < T::zero() {
            return Err(Error::InvalidParameter("tau must be non-negative".into()));
        }
        if visibility < T::zero() || visibility > T::one() {
            return Err(Error::InvalidParameter(
                "visibility must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            tau,
            lock,
            visibility,
        })
    }

    /// Delay chosen so that `Omega * tau = pi / 2` at the given analysis
    /// frequency.
    pub fn at_separation_frequency(omega: T, lock: Lock<T>, visibility: T) -> Result<Self> {
        Self::new(T::frac_pi_2() / omega, lock, visibility)
    }

    /// Mode-matching efficiency, the square of the fringe visibility.
    pub fn eta_mm(&self) -> T {
        self.visibility * self.visibility
    }
}

fn check_pair<T: Real>(v_plus: T, v_minus: T) -> Result<()> {
    if v_plus <= T::zero() || v_minus <= T::zero() {
        return Err(Error::InvalidParameter(
            "quadrature variances must be positive".into(),
        ));
    }
    let product = v_plus * v_minus;
    if product < T::one() - num::<T>(1e-12) {
        return Err(Error::UncertaintyViolation(
            num_traits::ToPrimitive::to_f64(&product).unwrap_or(f64::NAN),
        ));
    }
    Ok(())
}

/// Variance of every quadrature of either output beam for a symmetric input,
/// normalized to the QNL of one output: `(v+ + v- + 2) / 4`. Independent of
/// the homodyne angle by construction.
pub fn symmetric_output_variance<T: Real>(v_plus: T, v_minus: T) -> Result<T> {
    check_pair(v_plus, v_minus)?;
    Ok((v_plus + v_minus + num::<T>(2.0)) / num::<T>(4.0))
}

/// Sum and difference photocurrent variances of the two outputs, normalized
/// to the QNL of both output beams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationVariances<T> {
    /// `V(X1+ + X2+)/2 = (v+ + 1)/2`
    pub add_plus: T,
    /// `V(X1+ - X2+)/2 = (v- + 1)/2`
    pub sub_plus: T,
    /// `V(X1- + X2-)/2 = (v- + 1)/2`
    pub add_minus: T,
    /// `V(X1- - X2-)/2 = (v+ + 1)/2`
    pub sub_minus: T,
}

pub fn correlation_variances<T: Real>(v_plus: T, v_minus: T) -> Result<CorrelationVariances<T>> {
    check_pair(v_plus, v_minus)?;
    let two = num::<T>(2.0);
    let p = (v_plus + T::one()) / two;
    let m = (v_minus + T::one()) / two;
    Ok(CorrelationVariances {
        add_plus: p,
        sub_plus: m,
        add_minus: m,
        sub_minus: p,
    })
}

/// Intensity noise of either output with imperfect mode matching:
/// `(v+ + eta_mm v- + 3 - eta_mm) / 4`. Reduces to
/// [`symmetric_output_variance`] at `eta_mm = 1`.
pub fn mode_mismatch_output<T: Real>(v_plus: T, v_minus: T, eta_mm: T) -> Result<T> {
    if eta_mm < T::zero() || eta_mm > T::one() {
        return Err(Error::InvalidParameter("eta_mm must lie in [0, 1]".into()));
    }
    check_pair(v_plus, v_minus)?;
    Ok((v_plus + eta_mm * v_minus + num::<T>(3.0) - eta_mm) / num::<T>(4.0))
}

/// The UMZI as a network plus the grouping of its output beams into the two
/// spatial ports. With `visibility < 1`, each port carries an additional beam
/// for the mismatched spatial component, which interferes only with vacuum.
#[derive(Debug, Clone)]
pub struct UmziNetwork<T> {
    pub network: OpticalNetwork<T>,
    /// Input rail label for the signal beam.
    pub input: String,
    pub port1: Vec<String>,
    pub port2: Vec<String>,
}

/// Three-element network (50/50 splitter, delay + lock phase arm, 50/50
/// splitter). When `visibility < 1`, the delayed arm is rotated into matched
/// and orthogonal spatial components before recombination; the orthogonal
/// part interferes with vacuum and exits on the `*_mm` beams of each port.
pub fn build_umzi_network<T: Real>(cfg: &UmziConfig<T>) -> Result<UmziNetwork<T>> {
    let phi = cfg.lock.phi();
    let matched = cfg.visibility >= T::one();
    let mut net = if matched {
        OpticalNetwork::new([("in", "out1"), ("vac", "out2")])?
    } else {
        OpticalNetwork::new([
            ("in", "out1"),
            ("vac", "out2"),
            ("mm_w", "out2_mm"),
            ("mm_v", "out1_mm"),
        ])?
    };
    net.beamsplitter("in", "vac", num(0.5))?;
    net.delay("vac", cfg.tau)?;
    net.phase_shift("vac", phi)?;
    if !matched {
        // split the delayed arm into matched / orthogonal spatial components
        net.rotation("vac", "mm_w", cfg.visibility.acos())?;
    }
    net.beamsplitter("in", "vac", num(0.5))?;
    if !matched {
        net.beamsplitter("mm_v", "mm_w", num(0.5))?;
    }
    let (port1, port2) = if matched {
        (vec!["out1".to_string()], vec!["out2".to_string()])
    } else {
        (
            vec!["out1".to_string(), "out1_mm".to_string()],
            vec!["out2".to_string(), "out2_mm".to_string()],
        )
    };
    Ok(UmziNetwork {
        network: net,
        input: "in".to_string(),
        port1,
        port2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{AnalysisSetup, Sideband, SidebandState};
    use approx::assert_relative_eq;

    const V4_PLUS: f64 = 0.3981071705534972;
    const V4_MINUS: f64 = 2.5118864315095797;
    const N4: f64 = 0.22749840051576923;

    fn separation_setup(phi: f64) -> AnalysisSetup<f64> {
        AnalysisSetup::separation_point(2.0 * std::f64::consts::PI * 10.25e6, phi).unwrap()
    }

    #[test]
    fn closed_form_values() {
        assert_relative_eq!(symmetric_output_variance(1.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            symmetric_output_variance(V4_PLUS, V4_MINUS).unwrap(),
            1.2274984005157692,
            max_relative = 1e-12
        );
        let c = correlation_variances(V4_PLUS, V4_MINUS).unwrap();
        assert_relative_eq!(c.add_plus, 0.6990535852767486, max_relative = 1e-12);
        assert_relative_eq!(c.sub_minus, 0.6990535852767486, max_relative = 1e-12);
        assert_relative_eq!(c.sub_plus, 1.7559432157547899, max_relative = 1e-12);
        assert_relative_eq!(c.add_minus, 1.7559432157547899, max_relative = 1e-12);
        let all_one = correlation_variances(1.0, 1.0).unwrap();
        for v in [
            all_one.add_plus,
            all_one.sub_plus,
            all_one.add_minus,
            all_one.sub_minus,
        ] {
            assert_relative_eq!(v, 1.0);
        }
    }

    #[test]
    fn mode_mismatch_limits() {
        assert_relative_eq!(
            mode_mismatch_output(V4_PLUS, V4_MINUS, 1.0).unwrap(),
            symmetric_output_variance(V4_PLUS, V4_MINUS).unwrap(),
            max_relative = 1e-14
        );
        // visibility 98%
        assert_relative_eq!(
            mode_mismatch_output(V4_PLUS, V4_MINUS, 0.98f64.powi(2)).unwrap(),
            1.2125307248438246,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            mode_mismatch_output(V4_PLUS, V4_MINUS, 0.0).unwrap(),
            (V4_PLUS + 3.0) / 4.0,
            max_relative = 1e-14
        );
        assert!(mode_mismatch_output(V4_PLUS, V4_MINUS, 1.5).is_err());
    }

    #[test]
    fn excess_noise_for_any_nonvacuum_input() {
        for v in [0.01, 0.2, 0.9999, 1.0001, 7.0, 100.0] {
            let out = symmetric_output_variance(v, 1.0 / v).unwrap();
            if (v - 1.0f64).abs() > 1e-12 {
                assert!(out > 1.0, "v = {v} gave {out}");
            }
        }
    }

    #[test]
    fn separation_identities_at_plus_half_pi() {
        let setup = separation_setup(std::f64::consts::FRAC_PI_2);
        let cfg = UmziConfig::new(setup.tau, Lock::PlusHalfPi, 1.0).unwrap();
        let umzi = build_umzi_network(&cfg).unwrap();
        let input = SidebandState::squeezed("in", V4_PLUS, V4_MINUS, setup).unwrap();
        let out = umzi.network.propagate(&input).unwrap();

        assert_relative_eq!(
            out.single_sideband_power("out1", Sideband::Upper).unwrap(),
            N4,
            max_relative = 1e-12
        );
        assert!(out.single_sideband_power("out1", Sideband::Lower).unwrap() < 1e-12);
        assert!(out.single_sideband_power("out2", Sideband::Upper).unwrap() < 1e-12);
        assert_relative_eq!(
            out.single_sideband_power("out2", Sideband::Lower).unwrap(),
            N4,
            max_relative = 1e-12
        );
        // no intra-beam cross moment survives the separation
        let u1 = out.mode_index("out1", Sideband::Upper).unwrap();
        assert!(out.moments().anomalous()[(u1, u1 + 1)].norm() < 1e-12);
    }

    #[test]
    fn lock_minus_half_pi_swaps_ports() {
        let setup = separation_setup(-std::f64::consts::FRAC_PI_2);
        let cfg = UmziConfig::new(setup.tau, Lock::MinusHalfPi, 1.0).unwrap();
        let umzi = build_umzi_network(&cfg).unwrap();
        let input = SidebandState::squeezed("in", V4_PLUS, V4_MINUS, setup).unwrap();
        let out = umzi.network.propagate(&input).unwrap();
        assert!(out.single_sideband_power("out1", Sideband::Upper).unwrap() < 1e-12);
        assert_relative_eq!(
            out.single_sideband_power("out1", Sideband::Lower).unwrap(),
            N4,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            out.single_sideband_power("out2", Sideband::Upper).unwrap(),
            N4,
            max_relative = 1e-12
        );
    }

    #[test]
    fn pipeline_matches_symmetric_output_formula() {
        let setup = separation_setup(std::f64::consts::FRAC_PI_2);
        let cfg = UmziConfig::new(setup.tau, Lock::PlusHalfPi, 1.0).unwrap();
        let umzi = build_umzi_network(&cfg).unwrap();
        let input = SidebandState::squeezed("in", V4_PLUS, V4_MINUS, setup).unwrap();
        let out = umzi.network.propagate(&input).unwrap();
        let expected = symmetric_output_variance(V4_PLUS, V4_MINUS).unwrap();
        for beam in ["out1", "out2"] {
            for k in 0..32 {
                let theta = k as f64 * std::f64::consts::PI / 16.0;
                assert_relative_eq!(
                    out.quadrature_variance(beam, theta).unwrap(),
                    expected,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn eta_mm_is_visibility_squared() {
        let cfg = UmziConfig::new(1.0e-9, Lock::PlusHalfPi, 0.98).unwrap();
        assert_relative_eq!(cfg.eta_mm(), 0.9604, max_relative = 1e-15);
        assert!(UmziConfig::new(1.0e-9, Lock::<f64>::PlusHalfPi, 1.2).is_err());
    }
}
