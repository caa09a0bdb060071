//! Passive optical networks as ordered element lists over labeled rails.
//!
//! A network is a set of parallel mode lines ("rails"), each with an input
//! and an output label, and an ordered list of passive elements acting on
//! one or two rails. The total scattering matrix at a probe frequency is the
//! ordered product of the element matrices and is unitary once loss ancillas
//! are made explicit. Loss is a beamsplitter to an unobserved vacuum ancilla
//! which is traced out on propagation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, Real};
use crate::state::{CoherentSidebands, SidebandState};

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind<T> {
    /// `out_a = sqrt(1-r) a + i sqrt(r) b`, `out_b = i sqrt(r) a + sqrt(1-r) b`.
    /// The symmetric (i on reflection) convention is fixed throughout.
    BeamSplitter { reflectivity: T },
    /// Frequency-independent phase `e^{i phase}` on one rail.
    PhaseShift { phase: T },
    /// `e^{i omega tau}` on one rail; the carrier phase omega_0 tau is folded
    /// into an explicit [`ElementKind::PhaseShift`] by the caller.
    Delay { tau: T },
    /// Transmission `t` to the rail, the rest to a hidden vacuum ancilla.
    Loss { transmission: T },
}

#[derive(Debug, Clone)]
pub struct Element<T> {
    pub kind: ElementKind<T>,
    /// Primary rail index.
    pub a: usize,
    /// Second rail for beamsplitters, ancilla rail for losses.
    pub b: Option<usize>,
}

/// One mode line through the network.
#[derive(Debug, Clone)]
pub struct Rail {
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone)]
pub struct OpticalNetwork<T> {
    rails: Vec<Rail>,
    /// Hidden vacuum rails appended after the external ones.
    ancillas: usize,
    elements: Vec<Element<T>>,
}

impl<T: Real> OpticalNetwork<T> {
    /// New network over external rails given as `(input_label, output_label)`.
    pub fn new<S: Into<String>>(rails: impl IntoIterator<Item = (S, S)>) -> Result<Self> {
        let rails: Vec<Rail> = rails
            .into_iter()
            .map(|(i, o)| Rail {
                input: i.into(),
                output: o.into(),
            })
            .collect();
        for (k, r) in rails.iter().enumerate() {
            if rails[..k].iter().any(|p| p.input == r.input) {
                return Err(Error::Topology(format!(
                    "duplicate input rail label `{}`",
                    r.input
                )));
            }
            if rails[..k].iter().any(|p| p.output == r.output) {
                return Err(Error::Topology(format!(
                    "duplicate output rail label `{}`",
                    r.output
                )));
            }
        }
        Ok(Self {
            rails,
            ancillas: 0,
            elements: Vec::new(),
        })
    }

    fn rail_index(&self, input_label: &str) -> Result<usize> {
        self.rails
            .iter()
            .position(|r| r.input == input_label)
            .ok_or_else(|| Error::Topology(format!("no rail with input label `{input_label}`")))
    }

    pub fn beamsplitter(&mut self, rail_a: &str, rail_b: &str, reflectivity: T) -> Result<&mut Self> {
        if reflectivity < T::zero() || reflectivity > T::one() {
            return Err(Error::InvalidParameter(
                "beamsplitter reflectivity must lie in [0, 1]".into(),
            ));
        }
        let a = self.rail_index(rail_a)?;
        let b = self.rail_index(rail_b)?;
        if a == b {
            return Err(Error::Topology("beamsplitter needs two distinct rails".into()));
        }
        self.elements.push(Element {
            kind: ElementKind::BeamSplitter { reflectivity },
            a,
            b: Some(b),
        });
        Ok(self)
    }

    pub fn phase_shift(&mut self, rail: &str, phase: T) -> Result<&mut Self> {
        let a = self.rail_index(rail)?;
        self.elements.push(Element {
            kind: ElementKind::PhaseShift { phase },
            a,
            b: None,
        });
        Ok(self)
    }

    pub fn delay(&mut self, rail: &str, tau: T) -> Result<&mut Self> {
        if tau < T::zero() {
            return Err(Error::InvalidParameter("delay must be non-negative".into()));
        }
        let a = self.rail_index(rail)?;
        self.elements.push(Element {
            kind: ElementKind::Delay { tau },
            a,
            b: None,
        });
        Ok(self)
    }

    pub fn loss(&mut self, rail: &str, transmission: T) -> Result<&mut Self> {
        if transmission < T::zero() || transmission > T::one() {
            return Err(Error::InvalidParameter(
                "loss transmission must lie in [0, 1]".into(),
            ));
        }
        let a = self.rail_index(rail)?;
        let anc = self.rails.len() + self.ancillas;
        self.ancillas += 1;
        self.elements.push(Element {
            kind: ElementKind::Loss { transmission },
            a,
            b: Some(anc),
        });
        Ok(self)
    }

    /// Real mode-overlap rotation: `out_a = cos a + sin b`,
    /// `out_b = -sin a + cos b`. Composed from phase shifts and a
    /// beamsplitter, used by the mode-mismatch model.
    pub fn rotation(&mut self, rail_a: &str, rail_b: &str, angle: T) -> Result<&mut Self> {
        let s = angle.sin();
        self.phase_shift(rail_b, -T::frac_pi_2())?;
        self.beamsplitter(rail_a, rail_b, s * s)?;
        self.phase_shift(rail_b, T::frac_pi_2())?;
        Ok(self)
    }

    pub fn rails(&self) -> &[Rail] {
        &self.rails
    }

    /// External plus ancilla rail count.
    pub fn total_rails(&self) -> usize {
        self.rails.len() + self.ancillas
    }

    /// Rail index of an external input label.
    pub fn input_index(&self, label: &str) -> Result<usize> {
        self.rail_index(label)
    }

    /// Rail index of an external output label.
    pub fn output_index(&self, label: &str) -> Result<usize> {
        self.rails
            .iter()
            .position(|r| r.output == label)
            .ok_or_else(|| Error::Topology(format!("no rail with output label `{label}`")))
    }

    pub fn input_labels(&self) -> impl Iterator<Item = &str> {
        self.rails.iter().map(|r| r.input.as_str())
    }

    pub fn output_labels(&self) -> impl Iterator<Item = &str> {
        self.rails.iter().map(|r| r.output.as_str())
    }

    /// Total scattering matrix (inputs to outputs, ancillas included) at the
    /// probe frequency `omega` relative to the carrier.
    pub fn scattering_matrix(&self, omega: T) -> DMatrix<Complex<T>> {
        let n = self.total_rails();
        let mut s: DMatrix<Complex<T>> = DMatrix::identity(n, n);
        for el in &self.elements {
            apply_element(&mut s, el, omega);
        }
        s
    }

    /// `||S^dag S - I||` at the probe frequency.
    pub fn unitarity_defect(&self, omega: T) -> T {
        let s = self.scattering_matrix(omega);
        let n = s.nrows();
        (s.adjoint() * &s - DMatrix::<Complex<T>>::identity(n, n)).norm()
    }

    /// Sequential composition: `other` consumes this network's outputs.
    /// Every input rail of `other` must match one of `self`'s output labels.
    pub fn then(&self, other: &Self) -> Result<Self> {
        let mut rails = self.rails.clone();
        let mut map = vec![0usize; other.rails.len()];
        for (q, r) in other.rails.iter().enumerate() {
            let k = rails
                .iter()
                .position(|p| p.output == r.input)
                .ok_or_else(|| {
                    Error::Topology(format!(
                        "composition: no upstream output named `{}`",
                        r.input
                    ))
                })?;
            map[q] = k;
            rails[k].output = r.output.clone();
        }
        let ext = rails.len();
        let mut elements = self.elements.clone();
        for el in &other.elements {
            let remap = |idx: usize| {
                if idx < other.rails.len() {
                    map[idx]
                } else {
                    // other's ancilla, shifted past ours
                    ext + self.ancillas + (idx - other.rails.len())
                }
            };
            elements.push(Element {
                kind: el.kind.clone(),
                a: remap(el.a),
                b: el.b.map(remap),
            });
        }
        Ok(Self {
            rails,
            ancillas: self.ancillas + other.ancillas,
            elements,
        })
    }

    /// Push a state through the network. Beams are matched to input rails by
    /// label; unconnected inputs are auto-filled with vacuum. Coherent
    /// amplitudes transform by `S(+Omega)`, `S(-Omega)` and `S(0)` (carrier);
    /// the moment blocks transform congruently, with +Omega modes seeing
    /// `S(+Omega)` and -Omega modes `S(-Omega)`. Ancilla modes are traced out.
    pub fn propagate(&self, state: &SidebandState<T>) -> Result<SidebandState<T>> {
        let setup = *state.setup();
        let m = self.total_rails();
        // map each state beam onto a rail
        let mut rail_of_beam = Vec::with_capacity(state.beams().len());
        for beam in state.beams() {
            rail_of_beam.push(self.rail_index(beam)?);
        }

        let s_p = self.scattering_matrix(setup.omega);
        let s_m = self.scattering_matrix(-setup.omega);
        let s_0 = self.scattering_matrix(T::zero());

        // full mode-space transform, modes ordered (rail0 upper, rail0 lower, ...)
        let zero = Complex::new(T::zero(), T::zero());
        let mut u = DMatrix::from_element(2 * m, 2 * m, zero);
        for i in 0..m {
            for j in 0..m {
                u[(2 * i, 2 * j)] = s_p[(i, j)];
                u[(2 * i + 1, 2 * j + 1)] = s_m[(i, j)];
            }
        }

        // embed input moments into rail-mode space
        let mut p_in = DMatrix::from_element(2 * m, 2 * m, zero);
        let mut q_in = DMatrix::from_element(2 * m, 2 * m, zero);
        let np = state.moments().normal();
        let nq = state.moments().anomalous();
        for (bi, &ri) in rail_of_beam.iter().enumerate() {
            for (bj, &rj) in rail_of_beam.iter().enumerate() {
                for si in 0..2 {
                    for sj in 0..2 {
                        p_in[(2 * ri + si, 2 * rj + sj)] = np[(2 * bi + si, 2 * bj + sj)];
                        q_in[(2 * ri + si, 2 * rj + sj)] = nq[(2 * bi + si, 2 * bj + sj)];
                    }
                }
            }
        }

        let u_conj = u.map(|z| z.conj());
        let p_out = &u_conj * p_in * u.transpose();
        let q_out = &u * q_in * u.transpose();

        // carrier and coherent sidebands per frequency
        let mut alpha_u = DVector::from_element(m, zero);
        let mut alpha_l = DVector::from_element(m, zero);
        let mut alpha_c = DVector::from_element(m, zero);
        for (bi, &ri) in rail_of_beam.iter().enumerate() {
            let c = state.coherent(&state.beams()[bi])?;
            alpha_u[ri] = c.upper;
            alpha_l[ri] = c.lower;
            alpha_c[ri] = c.carrier;
        }
        let alpha_u = &s_p * alpha_u;
        let alpha_l = &s_m * alpha_l;
        let alpha_c = &s_0 * alpha_c;

        // drop ancilla modes (partial trace over unobserved vacuum outputs)
        let ext = self.rails.len();
        let p_ext = p_out.view((0, 0), (2 * ext, 2 * ext)).into_owned();
        let q_ext = q_out.view((0, 0), (2 * ext, 2 * ext)).into_owned();
        let beams: Vec<String> = self.rails.iter().map(|r| r.output.clone()).collect();
        let coherent: Vec<CoherentSidebands<T>> = (0..ext)
            .map(|r| CoherentSidebands {
                upper: alpha_u[r],
                lower: alpha_l[r],
                carrier: alpha_c[r],
            })
            .collect();

        SidebandState::from_parts(beams, p_ext, q_ext, coherent, setup)
    }
}

fn apply_element<T: Real>(s: &mut DMatrix<Complex<T>>, el: &Element<T>, omega: T) {
    match &el.kind {
        ElementKind::BeamSplitter { reflectivity } => {
            let t = (T::one() - *reflectivity).sqrt();
            let r = reflectivity.sqrt();
            mix_rows(s, el.a, el.b.expect("bs rail"), t, r);
        }
        ElementKind::Loss { transmission } => {
            let t = transmission.sqrt();
            let r = (T::one() - *transmission).sqrt();
            mix_rows(s, el.a, el.b.expect("loss ancilla"), t, r);
        }
        ElementKind::PhaseShift { phase } => {
            scale_row(s, el.a, cis(*phase));
        }
        ElementKind::Delay { tau } => {
            scale_row(s, el.a, cis(omega * *tau));
        }
    }
}

/// Left-multiply by the 2x2 block [[t, i r], [i r, t]] on rows (a, b).
fn mix_rows<T: Real>(s: &mut DMatrix<Complex<T>>, a: usize, b: usize, t: T, r: T) {
    let ir = Complex::new(T::zero(), r);
    let t = Complex::new(t, T::zero());
    for col in 0..s.ncols() {
        let va = s[(a, col)];
        let vb = s[(b, col)];
        s[(a, col)] = t * va + ir * vb;
        s[(b, col)] = ir * va + t * vb;
    }
}

fn scale_row<T: Real>(s: &mut DMatrix<Complex<T>>, a: usize, factor: Complex<T>) {
    for col in 0..s.ncols() {
        s[(a, col)] *= factor;
    }
}

/// Photon flux carried by a state: sum over beams of upper + lower mean
/// photon numbers. Invariant under lossless propagation.
pub fn total_photon_flux<T: Real>(state: &SidebandState<T>) -> T {
    let mut acc = T::zero();
    let p = state.moments().normal();
    for k in 0..p.nrows() {
        acc += p[(k, k)].re;
    }
    acc
}
