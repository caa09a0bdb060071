//! Scalar abstraction: the whole library is generic over `f32`/`f64`.

use num_complex::Complex;
use rand::Rng;

/// Real scalar type the simulator computes with.
///
/// `nalgebra::RealField` supplies the transcendental functions and linear
/// algebra support; `FromPrimitive` lets us lift literal constants.
pub trait Real:
    nalgebra::RealField
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Copy
    + Default
    + Send
    + Sync
{
    /// Draw one standard-normal sample.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Real for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(rand_distr::StandardNormal)
    }
}

impl Real for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(rand_distr::StandardNormal)
    }
}

/// Lift an `f64` literal into the working scalar type.
pub(crate) fn num<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal conversion")
}

/// e^{i theta}
pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// 10 * log10(x), the dB convention used for all QNL-normalized variances.
pub fn to_db<T: Real>(linear: T) -> T {
    num::<T>(10.0) * linear.log10()
}

/// Inverse of [`to_db`].
pub fn from_db<T: Real>(db: T) -> T {
    num::<T>(10.0).powf(db / num::<T>(10.0))
}

/// Reduce an angle to the interval (-pi, pi].
pub fn reduce_angle<T: Real>(phi: T) -> T {
    let two_pi = T::two_pi();
    let mut r = phi % two_pi;
    if r > T::pi() {
        r -= two_pi;
    } else if r <= -T::pi() {
        r += two_pi;
    }
    r
}
