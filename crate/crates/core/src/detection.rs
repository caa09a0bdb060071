//! Detection models: homodyne with efficiency, joint two-beam quadrature
//! correlations, carrier-weighted direct detection, the interferometric
//! Bell-type measurement on bright beams, and the entanglement verdict.
//!
//! Quadrature angles at the detection layer are referenced to each beam's
//! carrier phase when a carrier is present (the local oscillator is derived
//! from the beam); carrier-free beams use absolute angles.

use nalgebra::DVector;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::network::OpticalNetwork;
use crate::scalar::{cis, num, to_db, Real};
use crate::state::{Sideband, SidebandState};

/// Which vacuum level a variance is normalized to. Per-beam results use the
/// QNL of one output; sum/difference correlations use the QNL of both output
/// beams. The tag keeps the two conventions from being conflated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Normalization {
    OneOutputQnl,
    TwoOutputQnl,
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Normalization::OneOutputQnl => write!(f, "one-output-QNL"),
            Normalization::TwoOutputQnl => write!(f, "two-output-QNL"),
        }
    }
}

/// A named, QNL-normalized variance in linear and dB form.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementResult<T> {
    pub name: String,
    pub value_linear: T,
    /// `10 log10(value_linear)`; negative means below the QNL.
    pub value_db: T,
    pub normalization: Normalization,
}

impl<T: Real> MeasurementResult<T> {
    pub fn new(name: impl Into<String>, value_linear: T, normalization: Normalization) -> Self {
        Self {
            name: name.into(),
            value_linear,
            value_db: to_db(value_linear),
            normalization,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig<T> {
    /// Homodyne fringe visibility; efficiency contribution is its square.
    pub homodyne_visibility: T,
    pub quantum_efficiency: T,
}

impl<T: Real> DetectorConfig<T> {
    pub fn new(homodyne_visibility: T, quantum_efficiency: T) -> Result<Self> {
        for (name, v) in [
            ("homodyne_visibility", homodyne_visibility),
            ("quantum_efficiency", quantum_efficiency),
        ] {
            if v < T::zero() || v > T::one() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1]"
                )));
            }
        }
        Ok(Self {
            homodyne_visibility,
            quantum_efficiency,
        })
    }

    pub fn ideal() -> Self {
        Self {
            homodyne_visibility: T::one(),
            quantum_efficiency: T::one(),
        }
    }

    /// Overall detection efficiency `visibility^2 * quantum_efficiency`.
    pub fn efficiency(&self) -> T {
        self.homodyne_visibility * self.homodyne_visibility * self.quantum_efficiency
    }
}

/// Reference phase of a beam: the carrier phase when the beam is bright.
fn reference_phase<T: Real>(state: &SidebandState<T>, beam: &str) -> Result<T> {
    let c = state.coherent(beam)?.carrier;
    if c.norm_sqr() > T::zero() {
        Ok(c.im.atan2(c.re))
    } else {
        Ok(T::zero())
    }
}

/// Coefficients on `(a_k, a_k^dag)` defining a measured linear form.
type LinearForm<T> = (DVector<Complex<T>>, DVector<Complex<T>>);

/// Coefficient vectors of the quadrature `X(theta)` of one beam.
fn quadrature_form<T: Real>(
    state: &SidebandState<T>,
    beam: &str,
    theta: T,
) -> Result<LinearForm<T>> {
    let modes = state.moments().modes();
    let zero = Complex::new(T::zero(), T::zero());
    let mut c = DVector::from_element(modes, zero);
    let mut d = DVector::from_element(modes, zero);
    c[state.mode_index(beam, Sideband::Upper)?] = cis(-theta);
    d[state.mode_index(beam, Sideband::Lower)?] = cis(theta);
    Ok((c, d))
}

/// Homodyne measurement of `X(theta)` (theta relative to the beam's carrier),
/// with the standard pre-detector loss model:
/// `V_meas = eta V(theta) + (1 - eta)`.
pub fn homodyne<T: Real>(
    state: &SidebandState<T>,
    beam: &str,
    theta: T,
    det: &DetectorConfig<T>,
) -> Result<MeasurementResult<T>> {
    let theta_abs = theta + reference_phase(state, beam)?;
    let v = state.quadrature_variance(beam, theta_abs)?;
    let eta = det.efficiency();
    let v_meas = eta * v + (T::one() - eta);
    Ok(MeasurementResult::new(
        format!("homodyne({beam}, theta={theta:?})"),
        v_meas,
        Normalization::OneOutputQnl,
    ))
}

/// The four sum/difference quadrature variances of two beams, each normalized
/// to the QNL of both outputs: `V(X_A^pm +- X_B^pm) / 2`.
#[derive(Debug, Clone)]
pub struct JointVariances<T> {
    pub add_plus: MeasurementResult<T>,
    pub sub_plus: MeasurementResult<T>,
    pub add_minus: MeasurementResult<T>,
    pub sub_minus: MeasurementResult<T>,
}

pub fn joint_variances<T: Real>(
    state: &SidebandState<T>,
    beam_a: &str,
    beam_b: &str,
) -> Result<JointVariances<T>> {
    if beam_a == beam_b {
        return Err(Error::InvalidParameter(
            "joint variances need two distinct beams".into(),
        ));
    }
    let theta_a = reference_phase(state, beam_a)?;
    let theta_b = reference_phase(state, beam_b)?;
    let half_pi = T::frac_pi_2();
    let two = num::<T>(2.0);

    let combine = |name: &str, ta: T, tb: T, sign: T| -> Result<MeasurementResult<T>> {
        let (ca, da) = quadrature_form(state, beam_a, ta)?;
        let (cb, db) = quadrature_form(state, beam_b, tb)?;
        let sc = Complex::new(sign, T::zero());
        let c = ca + cb.map(|z| z * sc);
        let d = da + db.map(|z| z * sc);
        let v = state.linear_form_variance(&c, &d) / two;
        Ok(MeasurementResult::new(name, v, Normalization::TwoOutputQnl))
    };

    Ok(JointVariances {
        add_plus: combine("V_add_plus", theta_a, theta_b, T::one())?,
        sub_plus: combine("V_sub_plus", theta_a, theta_b, -T::one())?,
        add_minus: combine("V_add_minus", theta_a + half_pi, theta_b + half_pi, T::one())?,
        sub_minus: combine("V_sub_minus", theta_a + half_pi, theta_b + half_pi, -T::one())?,
    })
}

/// Coefficients of the direct-detection photocurrent fluctuation of a group
/// of co-detected beams, plus the group's shot-noise level (carrier power).
fn direct_form<T: Real>(
    state: &SidebandState<T>,
    beams: &[&str],
) -> Result<(LinearForm<T>, T)> {
    let modes = state.moments().modes();
    let zero = Complex::new(T::zero(), T::zero());
    let mut c = DVector::from_element(modes, zero);
    let mut d = DVector::from_element(modes, zero);
    let mut shot = T::zero();
    for beam in beams {
        let carrier = state.coherent(beam)?.carrier;
        c[state.mode_index(beam, Sideband::Upper)?] = carrier.conj();
        d[state.mode_index(beam, Sideband::Lower)?] = carrier;
        shot += carrier.norm_sqr();
    }
    Ok(((c, d), shot))
}

/// Intensity-noise variance of one detected port (all spatial modes summed),
/// normalized to the port's own shot noise.
pub fn direct_detection<T: Real>(
    state: &SidebandState<T>,
    beams: &[&str],
) -> Result<MeasurementResult<T>> {
    let ((c, d), shot) = direct_form(state, beams)?;
    if shot <= T::zero() {
        return Err(Error::ZeroCarrier(beams.join("+")));
    }
    let v = state.linear_form_variance(&c, &d) / shot;
    Ok(MeasurementResult::new(
        format!("direct({})", beams.join("+")),
        v,
        Normalization::OneOutputQnl,
    ))
}

/// Sum and difference photocurrent variances of two detected ports,
/// normalized to the combined shot noise of both.
pub fn joint_direct<T: Real>(
    state: &SidebandState<T>,
    port_a: &[&str],
    port_b: &[&str],
) -> Result<(MeasurementResult<T>, MeasurementResult<T>)> {
    let ((ca, da), shot_a) = direct_form(state, port_a)?;
    let ((cb, db), shot_b) = direct_form(state, port_b)?;
    let shot = shot_a + shot_b;
    if shot_a <= T::zero() || shot_b <= T::zero() {
        return Err(Error::ZeroCarrier(format!(
            "{} / {}",
            port_a.join("+"),
            port_b.join("+")
        )));
    }
    let v_sum = state.linear_form_variance(&(&ca + &cb), &(&da + &db)) / shot;
    let v_diff = state.linear_form_variance(&(&ca - &cb), &(&da - &db)) / shot;
    Ok((
        MeasurementResult::new("direct_sum", v_sum, Normalization::TwoOutputQnl),
        MeasurementResult::new("direct_diff", v_diff, Normalization::TwoOutputQnl),
    ))
}

/// Interferometric Bell-type measurement on two bright ports: the ports
/// interfere on a 50/50 beamsplitter at the relative phase that balances the
/// output intensities (solved analytically from the carriers), both outputs
/// are detected directly, and the sum / difference photocurrents read
/// `V(X1+ + X2+)` and `V(X1- - X2-)`.
///
/// Ports are parallel lists of spatially matched beams; the first entry of
/// each is the bright primary mode. With `visibility < 1` the primary pair
/// interferes with degraded contrast via the mode-overlap model.
pub fn bell_measurement<T: Real>(
    state: &SidebandState<T>,
    port_a: &[&str],
    port_b: &[&str],
    visibility: T,
) -> Result<(MeasurementResult<T>, MeasurementResult<T>)> {
    if port_a.is_empty() || port_b.is_empty() || port_a.len() != port_b.len() {
        return Err(Error::InvalidParameter(
            "bell measurement needs two equally sized ports".into(),
        ));
    }
    if visibility <= T::zero() || visibility > T::one() {
        return Err(Error::InvalidParameter(
            "bell visibility must lie in (0, 1]".into(),
        ));
    }
    let alpha_a = state.coherent(port_a[0])?.carrier;
    let alpha_b = state.coherent(port_b[0])?.carrier;
    if alpha_a.norm_sqr() <= T::zero() {
        return Err(Error::ZeroCarrier(port_a[0].to_string()));
    }
    if alpha_b.norm_sqr() <= T::zero() {
        return Err(Error::ZeroCarrier(port_b[0].to_string()));
    }

    // equal output intensity: only the interference cross terms depend on the
    // relative phase psi, so solve Re(i e^{i psi} z) = 0 with z the summed
    // carrier overlap. The branch is pinned so the sum current reads the
    // joint amplitude quadrature.
    let mut z = alpha_a.conj() * alpha_b * Complex::new(visibility, T::zero());
    for k in 1..port_a.len() {
        z += state.coherent(port_a[k])?.carrier.conj() * state.coherent(port_b[k])?.carrier;
    }
    let psi = -z.im.atan2(z.re);

    let matched = visibility >= T::one();
    let mut rails: Vec<(String, String)> = Vec::new();
    for k in 0..port_a.len() {
        rails.push((port_a[k].to_string(), format!("bell_a{k}")));
        rails.push((port_b[k].to_string(), format!("bell_b{k}")));
    }
    if !matched {
        rails.push(("bell_w".to_string(), "bell_b_mm".to_string()));
        rails.push(("bell_v".to_string(), "bell_a_mm".to_string()));
    }
    let mut net = OpticalNetwork::new(rails)?;
    for b in port_b {
        net.phase_shift(b, psi)?;
    }
    if !matched {
        net.rotation(port_b[0], "bell_w", visibility.acos())?;
    }
    for k in 0..port_a.len() {
        net.beamsplitter(port_a[k], port_b[k], num(0.5))?;
    }
    if !matched {
        net.beamsplitter("bell_v", "bell_w", num(0.5))?;
    }
    let out = net.propagate(state)?;

    let mut det_a: Vec<String> = (0..port_a.len()).map(|k| format!("bell_a{k}")).collect();
    let mut det_b: Vec<String> = (0..port_b.len()).map(|k| format!("bell_b{k}")).collect();
    if !matched {
        det_a.push("bell_a_mm".to_string());
        det_b.push("bell_b_mm".to_string());
    }
    let det_a: Vec<&str> = det_a.iter().map(String::as_str).collect();
    let det_b: Vec<&str> = det_b.iter().map(String::as_str).collect();
    let (sum, diff) = joint_direct(&out, &det_a, &det_b)?;
    Ok((
        MeasurementResult::new("V_add_plus_bell", sum.value_linear, Normalization::TwoOutputQnl),
        MeasurementResult::new("V_sub_minus_bell", diff.value_linear, Normalization::TwoOutputQnl),
    ))
}

/// Entanglement verdict from the two conjugate joint variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict<T> {
    /// Sub-QNL correlations on both quadratures.
    pub entangled: bool,
    /// The larger (closest to threshold) of the two variances, in dB.
    pub margin_db: T,
    /// Auxiliary sum criterion value; entangled states give < 2.
    pub duan_sum: T,
}

pub fn entanglement_verdict<T: Real>(
    v_add_plus: &MeasurementResult<T>,
    v_sub_minus: &MeasurementResult<T>,
) -> Result<Verdict<T>> {
    for m in [v_add_plus, v_sub_minus] {
        if m.normalization != Normalization::TwoOutputQnl {
            return Err(Error::NormalizationMismatch {
                expected: Normalization::TwoOutputQnl.to_string(),
                got: m.normalization.to_string(),
            });
        }
    }
    let a = v_add_plus.value_linear;
    let b = v_sub_minus.value_linear;
    Ok(Verdict {
        entangled: a < T::one() && b < T::one(),
        margin_db: v_add_plus.value_db.max(v_sub_minus.value_db),
        duan_sum: a + b,
    })
}
