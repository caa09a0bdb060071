//! Timing constraints for sideband separation with pulsed light.
//!
//! Two conditions must hold simultaneously: successive pulses overlap in the
//! recombining arms (`delta_L = c n T_rep`) and the delay produces a quarter
//! period of phase at the measurement frequency (`delta_L = c / (4 f_m)`).
//! Valid measurement frequencies are therefore `f_m = 1 / (4 n T_rep)`.

use crate::error::{Error, Result};
use crate::scalar::{num, Real};

/// Speed of light in vacuum, m/s (free-space delay arm).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrainSpec<T> {
    /// Pulse repetition rate, Hz.
    pub rep_rate: T,
}

impl<T: Real> PulseTrainSpec<T> {
    pub fn new(rep_rate: T) -> Result<Self> {
        if rep_rate <= T::zero() {
            return Err(Error::InvalidParameter(
                "repetition rate must be positive".into(),
            ));
        }
        Ok(Self { rep_rate })
    }

    /// Time between two pulses, seconds.
    pub fn t_rep(&self) -> T {
        T::one() / self.rep_rate
    }
}

/// A pulse-overlap-compatible measurement configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingConfig<T> {
    pub n: u64,
    /// Measurement frequency `rep_rate / (4 n)`, Hz.
    pub f_m: T,
    /// Arm length difference `c n T_rep`, meters.
    pub delta_l: T,
}

/// Solve both constraints for pulse-overlap index `n >= 1`.
pub fn valid_measurement_frequency<T: Real>(
    spec: &PulseTrainSpec<T>,
    n: u64,
) -> Result<TimingConfig<T>> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let n_t = num::<T>(n as f64);
    let f_m = spec.rep_rate / (num::<T>(4.0) * n_t);
    let delta_l = num::<T>(SPEED_OF_LIGHT) * n_t * spec.t_rep();
    Ok(TimingConfig { n, f_m, delta_l })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingTarget<T> {
    pub config: TimingConfig<T>,
    /// `|f_m - f_target|`, Hz.
    pub error: T,
}

/// Integer `n` minimizing `|rep_rate / (4 n) - f_target|`, ties broken toward
/// smaller `n` (shorter delay line). Targets above `rep_rate / 4` are
/// unreachable.
pub fn nearest_valid_config<T: Real>(
    spec: &PulseTrainSpec<T>,
    f_target: T,
) -> Result<TimingTarget<T>> {
    if f_target <= T::zero() {
        return Err(Error::InvalidParameter(
            "target frequency must be positive".into(),
        ));
    }
    let f_max = spec.rep_rate / num::<T>(4.0);
    if f_target > f_max {
        return Err(Error::UnreachableFrequency(
            num_traits::ToPrimitive::to_f64(&f_target).unwrap_or(f64::NAN),
        ));
    }
    // f_m is monotone in n, so only the two integers bracketing the real
    // solution are candidates.
    let exact = spec.rep_rate / (num::<T>(4.0) * f_target);
    let lo = num_traits::ToPrimitive::to_f64(&exact.floor())
        .map(|x| x as u64)
        .unwrap_or(1)
        .max(1);
    let mut best: Option<TimingTarget<T>> = None;
    for n in [lo, lo + 1] {
        let config = valid_measurement_frequency(spec, n)?;
        let error = (config.f_m - f_target).abs();
        let better = match &best {
            None => true,
            Some(b) => error < b.error || (error == b.error && n < b.config.n),
        };
        if better {
            best = Some(TimingTarget { config, error });
        }
    }
    Ok(best.expect("candidate set is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec() -> PulseTrainSpec<f64> {
        PulseTrainSpec::new(82.0e6).unwrap()
    }

    #[test]
    fn arm_length_at_82_mhz() {
        let c1 = valid_measurement_frequency(&spec(), 1).unwrap();
        assert!((c1.delta_l - 3.66).abs() < 0.01);
        assert_relative_eq!(c1.f_m, 20.5e6, max_relative = 1e-12);

        let c2 = valid_measurement_frequency(&spec(), 2).unwrap();
        assert!((c2.delta_l - 7.32).abs() < 0.01);
        assert_relative_eq!(c2.f_m, 10.25e6, max_relative = 1e-12);
    }

    #[test]
    fn doubling_n_halves_frequency() {
        for n in [1u64, 3, 17, 1024] {
            let a = valid_measurement_frequency(&spec(), n).unwrap();
            let b = valid_measurement_frequency(&spec(), 2 * n).unwrap();
            assert_relative_eq!(a.f_m, 2.0 * b.f_m, max_relative = 1e-14);
        }
    }

    #[test]
    fn both_constraints_hold_simultaneously() {
        for n in [1u64, 2, 5, 999] {
            let c = valid_measurement_frequency(&spec(), n).unwrap();
            assert!((c.delta_l * 4.0 * c.f_m / SPEED_OF_LIGHT - 1.0).abs() < 1e-12);
            assert!((c.delta_l - SPEED_OF_LIGHT * n as f64 / 82.0e6).abs() < 1e-9);
        }
    }

    #[test]
    fn nearest_config_examples() {
        let t = nearest_valid_config(&spec(), 10.0e6).unwrap();
        assert_eq!(t.config.n, 2);
        assert_relative_eq!(t.config.f_m, 10.25e6, max_relative = 1e-12);

        let exact = nearest_valid_config(&spec(), 20.5e6).unwrap();
        assert_eq!(exact.config.n, 1);
        assert_relative_eq!(exact.error, 0.0);

        assert!(matches!(
            nearest_valid_config(&spec(), 30.0e6),
            Err(Error::UnreachableFrequency(_))
        ));
    }

    #[test]
    fn nearest_agrees_with_exhaustive_search() {
        use rand::{Rng, SeedableRng};
        let spec = spec();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let f_target: f64 = rng.gen_range(2.0e3..20.5e6);
            let fast = nearest_valid_config(&spec, f_target).unwrap();
            // independent oracle: scan n exhaustively past the optimum
            let mut best_n = 1u64;
            let mut best_err = f64::INFINITY;
            for n in 1..=20_000u64 {
                let err = (82.0e6 / (4.0 * n as f64) - f_target).abs();
                if err < best_err {
                    best_err = err;
                    best_n = n;
                }
            }
            assert_eq!(fast.config.n, best_n, "target {f_target}");
        }
    }
}
