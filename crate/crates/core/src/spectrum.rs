//! Scanning Fabry-Perot readout of the coherent line spectrum.
//!
//! The cavity is modelled as a Lorentzian comb: every optical line reappears
//! at its frequency modulo the free spectral range, folded into the scan
//! window. Only mean-field (coherent) power is rendered; the quantum noise
//! floor is far below the classical lines this instrument resolves.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::network::OpticalNetwork;
use crate::scalar::{num, Real};
use crate::state::SidebandState;
use crate::umzi::UmziNetwork;

/// Scanning Fabry-Perot interferometer parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FabryPerotSpec<T> {
    /// Free spectral range, Hz.
    pub fsr: T,
    /// Lorentzian full width at half maximum, Hz.
    pub linewidth: T,
    /// Width of the rendered scan window, Hz, centered on the carrier.
    pub scan_range: T,
    /// Number of rendered points across the scan window.
    pub resolution: usize,
}

impl<T: Real> FabryPerotSpec<T> {
    pub fn new(fsr: T, linewidth: T, scan_range: T, resolution: usize) -> Result<Self> {
        if !(linewidth > T::zero() && fsr > linewidth) {
            return Err(Error::InvalidParameter(
                "need fsr > linewidth > 0".into(),
            ));
        }
        if scan_range <= T::zero() || resolution < 2 {
            return Err(Error::InvalidParameter(
                "scan range must be positive and resolution at least 2".into(),
            ));
        }
        Ok(Self {
            fsr,
            linewidth,
            scan_range,
            resolution,
        })
    }
}

/// One coherent optical line, frequency relative to the carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine<T> {
    /// Offset from the carrier, Hz.
    pub frequency: T,
    /// Mean-field power `|alpha|^2`, linear.
    pub power: T,
}

/// Line lists arriving on the two output ports.
pub type PortLines<T> = (Vec<SpectralLine<T>>, Vec<SpectralLine<T>>);

/// A rendered power-vs-frequency curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub name: String,
    /// `(frequency_hz, power)` pairs on a uniform grid.
    pub points: Vec<(T, T)>,
}

impl<T: Real> Trace<T> {
    /// Trapezoid integral of the trace, power times Hz.
    pub fn integral(&self) -> T {
        let mut acc = T::zero();
        for w in self.points.windows(2) {
            let (f0, p0) = w[0];
            let (f1, p1) = w[1];
            acc += (p0 + p1) * (f1 - f0) / num::<T>(2.0);
        }
        acc
    }

    /// Copy with every point capped at `level`. Emulates the vertical clip
    /// used on oscilloscope screenshots so the carrier does not dwarf the
    /// sidebands.
    pub fn clipped(&self, level: T) -> Self {
        Self {
            name: self.name.clone(),
            points: self
                .points
                .iter()
                .map(|&(f, p)| (f, if p > level { level } else { p }))
                .collect(),
        }
    }
}

/// Default display clip: 1.2 times the tallest non-carrier line, or `None`
/// if only the carrier is present.
pub fn default_clip_level<T: Real>(lines: &[SpectralLine<T>]) -> Option<T> {
    let mut tallest: Option<T> = None;
    for l in lines {
        if l.frequency != T::zero() {
            tallest = Some(match tallest {
                Some(t) if t >= l.power => t,
                _ => l.power,
            });
        }
    }
    tallest.map(|t| t * num::<T>(1.2))
}

/// Coherent lines of one beam: carrier at 0 and sidebands at the analysis
/// frequency. Zero-power lines are dropped.
pub fn lines_of_beam<T: Real>(state: &SidebandState<T>, beam: &str) -> Result<Vec<SpectralLine<T>>> {
    let c = state.coherent(beam)?;
    let f_mod = state.setup().omega / T::two_pi();
    let mut lines = Vec::new();
    for (f, amp) in [
        (T::zero(), c.carrier),
        (f_mod, c.upper),
        (-f_mod, c.lower),
    ] {
        let p = amp.norm_sqr();
        if p > T::zero() {
            lines.push(SpectralLine {
                frequency: f,
                power: p,
            });
        }
    }
    Ok(lines)
}

/// Render a line list through the cavity comb onto the scan grid.
pub fn render_lines<T: Real>(
    name: &str,
    lines: &[SpectralLine<T>],
    fp: &FabryPerotSpec<T>,
) -> Trace<T> {
    let half = fp.scan_range / num::<T>(2.0);
    let step = fp.scan_range / num::<T>((fp.resolution - 1) as f64);
    let hw = fp.linewidth / num::<T>(2.0);
    let hw2 = hw * hw;
    let mut points = Vec::with_capacity(fp.resolution);
    for i in 0..fp.resolution {
        let f = -half + step * num::<T>(i as f64);
        let mut p = T::zero();
        for line in lines {
            // comb orders falling near the window; one order each side of
            // the nearest is enough since fsr > linewidth
            let k0 = ((f - line.frequency) / fp.fsr).round();
            for dk in [-T::one(), T::zero(), T::one()] {
                let fc = line.frequency + (k0 + dk) * fp.fsr;
                let d = f - fc;
                p += line.power * hw2 / (d * d + hw2);
            }
        }
        points.push((f, p));
    }
    Trace {
        name: name.to_string(),
        points,
    }
}

/// Spectrum of one beam, with optional extra injected lines (for example
/// weak mismatch tones riding on the input).
pub fn render_spectrum<T: Real>(
    state: &SidebandState<T>,
    beam: &str,
    extra: &[SpectralLine<T>],
    fp: &FabryPerotSpec<T>,
) -> Result<Trace<T>> {
    let mut lines = lines_of_beam(state, beam)?;
    lines.extend_from_slice(extra);
    Ok(render_lines(beam, &lines, fp))
}

fn port_power_at<T: Real>(
    net: &OpticalNetwork<T>,
    in_idx: usize,
    port_rails: &[usize],
    frequency: T,
    amplitude: Complex<T>,
) -> T {
    let s = net.scattering_matrix(T::two_pi() * frequency);
    port_rails
        .iter()
        .map(|&r| (s[(r, in_idx)] * amplitude).norm_sqr())
        .fold(T::zero(), |a, b| a + b)
}

/// Propagate every coherent line of `beam` (plus any extra injected lines)
/// through the interferometer at the line's own optical frequency, and
/// collect the power arriving on each spatial port.
pub fn separated_line_powers<T: Real>(
    state: &SidebandState<T>,
    beam: &str,
    umzi: &UmziNetwork<T>,
    extra: &[SpectralLine<T>],
) -> Result<PortLines<T>> {
    let net = &umzi.network;
    let in_idx = net.input_index(&umzi.input)?;
    let rails1: Vec<usize> = umzi
        .port1
        .iter()
        .map(|l| net.output_index(l))
        .collect::<Result<_>>()?;
    let rails2: Vec<usize> = umzi
        .port2
        .iter()
        .map(|l| net.output_index(l))
        .collect::<Result<_>>()?;

    let c = state.coherent(beam)?;
    let f_mod = state.setup().omega / T::two_pi();
    let mut inputs: Vec<(T, Complex<T>)> = vec![
        (T::zero(), c.carrier),
        (f_mod, c.upper),
        (-f_mod, c.lower),
    ];
    for l in extra {
        inputs.push((l.frequency, Complex::new(l.power.sqrt(), T::zero())));
    }

    let mut out1 = Vec::new();
    let mut out2 = Vec::new();
    for (f, amp) in inputs {
        if amp.norm_sqr() == T::zero() {
            continue;
        }
        let p1 = port_power_at(net, in_idx, &rails1, f, amp);
        let p2 = port_power_at(net, in_idx, &rails2, f, amp);
        out1.push(SpectralLine {
            frequency: f,
            power: p1,
        });
        out2.push(SpectralLine {
            frequency: f,
            power: p2,
        });
    }
    Ok((out1, out2))
}

/// Rendered spectra of the two separated output ports.
pub fn render_separated_spectra<T: Real>(
    state: &SidebandState<T>,
    beam: &str,
    umzi: &UmziNetwork<T>,
    extra: &[SpectralLine<T>],
    fp: &FabryPerotSpec<T>,
) -> Result<(Trace<T>, Trace<T>)> {
    let (l1, l2) = separated_line_powers(state, beam, umzi, extra)?;
    Ok((render_lines("port1", &l1, fp), render_lines("port2", &l2, fp)))
}
