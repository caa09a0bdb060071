//! Two-mode-per-beam sideband states at a fixed analysis frequency.
//!
//! Each beam carries a pair of quantum modes at +Omega and -Omega relative to
//! the carrier. Second moments are stored in creation/annihilation form: a
//! `normal` block `<a_j^dag a_k>` (Hermitian) and an `anomalous` block
//! `<a_j a_k>` (symmetric) over the ordered mode list
//! `(a_1(+Omega), a_1(-Omega), a_2(+Omega), ...)`. Conversion to symmetrized
//! quadrature covariances is a fixed linear map used for the physicality
//! check and by the Monte-Carlo sampler.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, num, Real};

/// Tolerance on eigenvalue negativity in the construction-time physicality
/// check. Downstream operations never see unphysical states.
const PHYSICALITY_TOL: f64 = 1e-9;

/// Analysis-frequency bookkeeping shared by a state and the networks it is
/// propagated through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSetup<T> {
    /// Sideband analysis frequency Omega, rad/s. Positive.
    pub omega: T,
    /// Interferometer delay tau, seconds.
    pub tau: T,
    /// Carrier lock phase phi, reduced to (-pi, pi]. The carrier phase enters
    /// only as phi = omega_0 * tau mod 2 pi.
    pub phi: T,
}

impl<T: Real> AnalysisSetup<T> {
    pub fn new(omega: T, tau: T, phi: T) -> Result<Self> {
        if omega <= T::zero() {
            return Err(Error::InvalidParameter("omega must be positive".into()));
        }
        if tau < T::zero() {
            return Err(Error::InvalidParameter("tau must be non-negative".into()));
        }
        Ok(Self {
            omega,
            tau,
            phi: crate::scalar::reduce_angle(phi),
        })
    }

    /// Setup at the exact separation point: Omega * tau = pi / 2.
    pub fn separation_point(omega: T, phi: T) -> Result<Self> {
        Self::new(omega, T::frac_pi_2() / omega, phi)
    }
}

/// Which of the two sideband modes of a beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sideband {
    Upper,
    Lower,
}

/// Coherent (mean-field) amplitudes of one beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentSidebands<T> {
    /// Coherent amplitude at +Omega.
    pub upper: Complex<T>,
    /// Coherent amplitude at -Omega.
    pub lower: Complex<T>,
    /// Carrier amplitude at the laser frequency.
    pub carrier: Complex<T>,
}

impl<T: Real> Default for CoherentSidebands<T> {
    fn default() -> Self {
        Self {
            upper: Complex::new(T::zero(), T::zero()),
            lower: Complex::new(T::zero(), T::zero()),
            carrier: Complex::new(T::zero(), T::zero()),
        }
    }
}

/// Modulation flavour for [`SidebandState::modulated_coherent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulationKind {
    Phase,
    Amplitude,
}

/// Second moments over the full ordered mode list.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePairMoments<T> {
    /// `normal[(j, k)] = <a_j^dag a_k>`. Hermitian.
    normal: DMatrix<Complex<T>>,
    /// `anomalous[(j, k)] = <a_j a_k>`. Symmetric.
    anomalous: DMatrix<Complex<T>>,
}

impl<T: Real> ModePairMoments<T> {
    pub fn vacuum(modes: usize) -> Self {
        Self {
            normal: DMatrix::zeros(modes, modes),
            anomalous: DMatrix::zeros(modes, modes),
        }
    }

    pub fn normal(&self) -> &DMatrix<Complex<T>> {
        &self.normal
    }

    pub fn anomalous(&self) -> &DMatrix<Complex<T>> {
        &self.anomalous
    }

    pub fn modes(&self) -> usize {
        self.normal.nrows()
    }
}

/// The central state object: beams, their mode-pair moments and coherent
/// amplitudes, and the analysis setup they live at.
///
/// Immutable after construction; every operation on it is a pure function.
#[derive(Debug, Clone)]
pub struct SidebandState<T> {
    beams: Vec<String>,
    moments: ModePairMoments<T>,
    coherent: Vec<CoherentSidebands<T>>,
    setup: AnalysisSetup<T>,
}

impl<T: Real> SidebandState<T> {
    /// Vacuum on the given beams: all moments and coherent amplitudes zero.
    pub fn vacuum<S: Into<String>>(
        beams: impl IntoIterator<Item = S>,
        setup: AnalysisSetup<T>,
    ) -> Self {
        let beams: Vec<String> = beams.into_iter().map(Into::into).collect();
        let n = beams.len();
        Self {
            moments: ModePairMoments::vacuum(2 * n),
            coherent: vec![CoherentSidebands::default(); n],
            beams,
            setup,
        }
    }

    /// Single-beam squeezed state with quadrature variances `v_plus` (theta =
    /// 0) and `v_minus` (theta = pi/2), symmetric sidebands:
    /// n = (v+ + v- - 2)/4, m = (v+ - v-)/4 real.
    pub fn squeezed(beam: &str, v_plus: T, v_minus: T, setup: AnalysisSetup<T>) -> Result<Self> {
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
        let four = num::<T>(4.0);
        let two = num::<T>(2.0);
        // clamp fp dust at the vacuum point
        let n = ((v_plus + v_minus - two) / four).max(T::zero());
        let m = (v_plus - v_minus) / four;

        let mut state = Self::vacuum([beam], setup);
        state.moments.normal[(0, 0)] = Complex::new(n, T::zero());
        state.moments.normal[(1, 1)] = Complex::new(n, T::zero());
        let mc = Complex::new(m, T::zero());
        state.moments.anomalous[(0, 1)] = mc;
        state.moments.anomalous[(1, 0)] = mc;
        state.check_physical()?;
        Ok(state)
    }

    /// Coherent beam with modulation sidebands at +-Omega and vacuum
    /// fluctuations. Phase modulation puts both sidebands in quadrature with
    /// the carrier (`alpha_upper = alpha_lower = i carrier beta / 2`);
    /// amplitude modulation puts them in phase.
    pub fn modulated_coherent(
        beam: &str,
        carrier: Complex<T>,
        beta: Complex<T>,
        kind: ModulationKind,
        setup: AnalysisSetup<T>,
    ) -> Self {
        let half = Complex::new(num::<T>(0.5), T::zero());
        let sideband = match kind {
            ModulationKind::Phase => Complex::new(T::zero(), T::one()) * carrier * beta * half,
            ModulationKind::Amplitude => carrier * beta * half,
        };
        let mut state = Self::vacuum([beam], setup);
        state.coherent[0] = CoherentSidebands {
            upper: sideband,
            lower: sideband,
            carrier,
        };
        state
    }

    /// Assemble a state from explicit moment blocks. Validates Hermiticity /
    /// symmetry and physicality, then stores exactly (anti)symmetrized blocks.
    pub fn from_parts(
        beams: Vec<String>,
        normal: DMatrix<Complex<T>>,
        anomalous: DMatrix<Complex<T>>,
        coherent: Vec<CoherentSidebands<T>>,
        setup: AnalysisSetup<T>,
    ) -> Result<Self> {
        let modes = 2 * beams.len();
        if normal.nrows() != modes
            || normal.ncols() != modes
            || anomalous.nrows() != modes
            || anomalous.ncols() != modes
            || coherent.len() != beams.len()
        {
            return Err(Error::InvalidParameter(
                "moment block dimensions do not match beam list".into(),
            ));
        }
        let tol = num::<T>(PHYSICALITY_TOL);
        let herm_err = (&normal - normal.adjoint()).norm();
        let sym_err = (&anomalous - anomalous.transpose()).norm();
        let scale = T::one().max(normal.norm()).max(anomalous.norm());
        if herm_err > tol * scale {
            return Err(Error::Unphysical("normal block is not Hermitian".into()));
        }
        if sym_err > tol * scale {
            return Err(Error::Unphysical("anomalous block is not symmetric".into()));
        }
        let half = Complex::new(num::<T>(0.5), T::zero());
        let state = Self {
            beams,
            moments: ModePairMoments {
                normal: (&normal + normal.adjoint()) * half,
                anomalous: (&anomalous + anomalous.transpose()) * half,
            },
            coherent,
            setup,
        };
        state.check_physical()?;
        Ok(state)
    }

    /// Merge states on disjoint beam sets into one product state.
    pub fn product(parts: &[Self]) -> Result<Self> {
        let setup = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty product".into()))?
            .setup;
        let mut beams = Vec::new();
        let mut coherent = Vec::new();
        for p in parts {
            for b in &p.beams {
                if beams.contains(b) {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate beam label `{b}` in product"
                    )));
                }
                beams.push(b.clone());
            }
            coherent.extend(p.coherent.iter().copied());
        }
        let modes = 2 * beams.len();
        let mut normal = DMatrix::zeros(modes, modes);
        let mut anomalous = DMatrix::zeros(modes, modes);
        let mut offset = 0usize;
        for p in parts {
            let pm = 2 * p.beams.len();
            normal
                .view_mut((offset, offset), (pm, pm))
                .copy_from(&p.moments.normal);
            anomalous
                .view_mut((offset, offset), (pm, pm))
                .copy_from(&p.moments.anomalous);
            offset += pm;
        }
        Self::from_parts(beams, normal, anomalous, coherent, setup)
    }

    /// Attach a carrier amplitude to a beam (bright beam).
    pub fn with_carrier(mut self, beam: &str, carrier: Complex<T>) -> Result<Self> {
        let i = self.beam_index(beam)?;
        self.coherent[i].carrier = carrier;
        Ok(self)
    }

    pub fn beams(&self) -> &[String] {
        &self.beams
    }

    pub fn setup(&self) -> &AnalysisSetup<T> {
        &self.setup
    }

    pub fn moments(&self) -> &ModePairMoments<T> {
        &self.moments
    }

    pub fn coherent(&self, beam: &str) -> Result<&CoherentSidebands<T>> {
        Ok(&self.coherent[self.beam_index(beam)?])
    }

    pub fn beam_index(&self, beam: &str) -> Result<usize> {
        self.beams
            .iter()
            .position(|b| b == beam)
            .ok_or_else(|| Error::UnknownBeam(beam.to_string()))
    }

    /// Mode index of `(beam, sideband)` in the ordered mode list.
    pub fn mode_index(&self, beam: &str, sideband: Sideband) -> Result<usize> {
        let i = self.beam_index(beam)?;
        Ok(match sideband {
            Sideband::Upper => 2 * i,
            Sideband::Lower => 2 * i + 1,
        })
    }

    /// Variance of the quadrature `X(theta) = e^{-i theta} a(+Omega) +
    /// e^{i theta} a(-Omega)^dag` of one beam, QNL = 1.
    ///
    /// `theta` is an absolute angle in the frame where the input carrier is
    /// real; detection-layer measurements reference it to the beam's carrier
    /// phase.
    pub fn quadrature_variance(&self, beam: &str, theta: T) -> Result<T> {
        let u = self.mode_index(beam, Sideband::Upper)?;
        let l = u + 1;
        let n_sum = self.moments.normal[(u, u)].re + self.moments.normal[(l, l)].re;
        let m = self.moments.anomalous[(u, l)];
        let rot = cis(-(theta + theta));
        Ok(n_sum + T::one() + num::<T>(2.0) * (rot * m).re)
    }

    /// Mean photon number of a single sideband mode of a beam.
    pub fn single_sideband_power(&self, beam: &str, which: Sideband) -> Result<T> {
        let k = self.mode_index(beam, which)?;
        Ok(self.moments.normal[(k, k)].re)
    }

    /// Classical direct-detection signal power at the analysis frequency,
    /// from the beat of the carrier with the coherent sideband amplitudes.
    pub fn modulation_signal_power(&self, beam: &str) -> Result<T> {
        let c = self.coherent(beam)?;
        let z = c.carrier.conj() * c.upper + c.carrier * c.lower.conj();
        Ok(num::<T>(4.0) * z.norm_sqr())
    }

    /// Variance of the linear form `L = sum_k c_k a_k + d_k a_k^dag`,
    /// symmetrized: `<L L^dag>_sym`. This single kernel powers quadrature,
    /// joint and direct-detection variances.
    pub fn linear_form_variance(
        &self,
        c: &DVector<Complex<T>>,
        d: &DVector<Complex<T>>,
    ) -> T {
        let modes = self.moments.modes();
        assert_eq!(c.len(), modes);
        assert_eq!(d.len(), modes);
        let p = &self.moments.normal;
        let q = &self.moments.anomalous;
        let half = num::<T>(0.5);
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..modes {
            for k in 0..modes {
                let delta = if j == k { half } else { T::zero() };
                let sym_jk = p[(j, k)] + Complex::new(delta, T::zero());
                let sym_kj = p[(k, j)] + Complex::new(delta, T::zero());
                acc += c[j] * c[k].conj() * sym_kj;
                acc += c[j] * d[k].conj() * q[(j, k)];
                acc += d[j] * c[k].conj() * q[(j, k)].conj();
                acc += d[j] * d[k].conj() * sym_jk;
            }
        }
        acc.re
    }

    /// Symmetrized complex covariance of the semiclassical amplitudes:
    /// `Gamma[(j, k)] = E[alpha_j alpha_k^*] = <a_j a_k^dag>_sym` and
    /// `C = <a_j a_k>`. Used by the physicality check and the Monte-Carlo
    /// oracle (each mode's `<a^dag a>` augmented by the vacuum half-quantum,
    /// attributed half per sideband mode).
    pub fn symmetrized_covariance(&self) -> (DMatrix<Complex<T>>, DMatrix<Complex<T>>) {
        let modes = self.moments.modes();
        let half = Complex::new(num::<T>(0.5), T::zero());
        let mut gamma = self.moments.normal.transpose();
        for j in 0..modes {
            gamma[(j, j)] += half;
        }
        (gamma, self.moments.anomalous.clone())
    }

    /// Real covariance over `(Re alpha_1, .., Re alpha_N, Im alpha_1, ..)`.
    pub fn real_covariance(&self) -> DMatrix<T> {
        let (gamma, c) = self.symmetrized_covariance();
        let n = gamma.nrows();
        let half = num::<T>(0.5);
        let mut sigma = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let g = gamma[(j, k)];
                let cc = c[(j, k)];
                sigma[(j, k)] = (g.re + cc.re) * half;
                sigma[(n + j, n + k)] = (g.re - cc.re) * half;
                sigma[(j, n + k)] = (cc.im - g.im) * half;
                sigma[(n + j, k)] = (cc.im + g.im) * half;
            }
        }
        sigma
    }

    fn check_physical(&self) -> Result<()> {
        let tol = num::<T>(PHYSICALITY_TOL);
        let modes = self.moments.modes();
        for j in 0..modes {
            if self.moments.normal[(j, j)].re < -tol {
                return Err(Error::Unphysical(format!(
                    "negative mean photon number on mode {j}"
                )));
            }
        }
        for c in &self.coherent {
            if !(c.upper.re.is_finite()
                && c.upper.im.is_finite()
                && c.lower.re.is_finite()
                && c.lower.im.is_finite()
                && c.carrier.re.is_finite()
                && c.carrier.im.is_finite())
            {
                return Err(Error::Unphysical("non-finite coherent amplitude".into()));
            }
        }
        // PSD of the symmetrized quadrature covariance
        let sigma = self.real_covariance();
        let scale = T::one().max(sigma.norm());
        let eig = sigma.symmetric_eigenvalues();
        if eig.iter().any(|&e| e < -tol * scale) {
            return Err(Error::Unphysical(
                "symmetrized covariance is not positive semidefinite".into(),
            ));
        }
        // per-beam uncertainty bound, rotation-invariant form:
        // V_min V_max = (n+ + n- + 1)^2 - 4|m|^2 >= 1
        for i in 0..self.beams.len() {
            let (u, l) = (2 * i, 2 * i + 1);
            let n_sum =
                self.moments.normal[(u, u)].re + self.moments.normal[(l, l)].re + T::one();
            let m2 = self.moments.anomalous[(u, l)].norm_sqr();
            let product = n_sum * n_sum - num::<T>(4.0) * m2;
            if product < T::one() - tol * scale {
                return Err(Error::Unphysical(format!(
                    "uncertainty bound violated on beam `{}`",
                    self.beams[i]
                )));
            }
        }
        Ok(())
    }
}
