//! Declarative experiment scenarios: TOML-configurable end-to-end runs that
//! tie the source, interferometer, detection and oracle layers together.
//!
//! This layer is deliberately concrete (`f64`); the generic machinery lives
//! underneath it.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::detection::{self, DetectorConfig, Verdict};
use crate::error::{Error, Result};
use crate::oracle::{self, OracleConfig, OracleMeasurement, Sign};
use crate::scalar::{from_db, to_db};
use crate::spectrum::{self, FabryPerotSpec, SpectralLine, Trace};
use crate::state::{AnalysisSetup, ModulationKind, SidebandState};
use crate::timing::{self, PulseTrainSpec};
use crate::umzi::{build_umzi_network, Lock, UmziConfig};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    Phase,
    Amplitude,
}

impl From<Modulation> for ModulationKind {
    fn from(m: Modulation) -> Self {
        match m {
            Modulation::Phase => ModulationKind::Phase,
            Modulation::Amplitude => ModulationKind::Amplitude,
        }
    }
}

/// What enters the interferometer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    Vacuum,
    /// Bright carrier with classical modulation sidebands.
    ModulatedCoherent {
        carrier: f64,
        beta: f64,
        modulation: Modulation,
    },
    /// Squeezed sidebands, optionally with a bright co-propagating carrier
    /// and excess (anti-squeezed quadrature) phase noise.
    Squeezed {
        /// Noise reduction below QNL at theta = 0, positive dB.
        squeezing_db: f64,
        /// Noise above QNL at theta = pi/2, positive dB.
        antisqueezing_db: f64,
        /// Extra phase-quadrature noise power, dB above QNL, added on top.
        #[serde(default)]
        excess_phase_db: f64,
        #[serde(default = "one")]
        carrier: f64,
    },
}

/// Cavity lock setpoint: `"+pi/2"`, `"-pi/2"`, or a custom angle in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LockSetting {
    Named(String),
    Radians(f64),
}

impl Default for LockSetting {
    fn default() -> Self {
        LockSetting::Named("+pi/2".into())
    }
}

impl LockSetting {
    pub fn resolve(&self) -> Result<Lock<f64>> {
        match self {
            LockSetting::Named(s) => match s.as_str() {
                "+pi/2" => Ok(Lock::PlusHalfPi),
                "-pi/2" => Ok(Lock::MinusHalfPi),
                other => Err(Error::Config(format!(
                    "unknown lock setpoint `{other}` (use \"+pi/2\", \"-pi/2\" or an angle)"
                ))),
            },
            LockSetting::Radians(phi) => Ok(Lock::Custom(*phi)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UmziSettings {
    /// Arm delay in seconds; `None` locks the delay to a quarter period of
    /// the analysis frequency (the separation point).
    pub delay_s: Option<f64>,
    pub lock: LockSetting,
    /// Interference visibility between the two arms.
    pub visibility: f64,
}

impl Default for UmziSettings {
    fn default() -> Self {
        Self {
            delay_s: None,
            lock: LockSetting::default(),
            visibility: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionSettings {
    pub homodyne_visibility: f64,
    pub quantum_efficiency: f64,
    /// Visibility of the interferometric Bell-type measurement.
    pub bell_visibility: f64,
}

impl Default for DetectionSettings {
    fn default() -> Self {
        Self {
            homodyne_visibility: 1.0,
            quantum_efficiency: 1.0,
            bell_visibility: 1.0,
        }
    }
}

/// A weak spurious tone on the input, power relative to one modulation
/// sideband.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MismatchLine {
    pub frequency_hz: f64,
    pub relative_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FabryPerotSettings {
    pub fsr_hz: f64,
    pub linewidth_hz: f64,
    pub scan_range_hz: f64,
    pub resolution: usize,
    pub mismatch_lines: Vec<MismatchLine>,
}

impl Default for FabryPerotSettings {
    fn default() -> Self {
        Self {
            fsr_hz: 500.0e6,
            linewidth_hz: 2.0e6,
            scan_range_hz: 600.0e6,
            resolution: 1201,
            mismatch_lines: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub analysis_frequency_hz: f64,
    pub source: SourceConfig,
    #[serde(default)]
    pub umzi: UmziSettings,
    #[serde(default)]
    pub detection: DetectionSettings,
    #[serde(default)]
    pub fabry_perot: FabryPerotSettings,
    #[serde(default)]
    pub oracle: Option<OracleSettings>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Bright phase-modulated beam at 90.5 MHz split on a 0.83 m delay
    /// interferometer with 98% visibility, read out on a scanning cavity.
    pub fn experiment_a() -> Self {
        Self {
            analysis_frequency_hz: 90.5e6,
            source: SourceConfig::ModulatedCoherent {
                carrier: 10.0,
                beta: 0.2,
                modulation: Modulation::Phase,
            },
            umzi: UmziSettings {
                delay_s: None,
                lock: LockSetting::default(),
                visibility: 0.98,
            },
            detection: DetectionSettings::default(),
            fabry_perot: FabryPerotSettings {
                mismatch_lines: vec![
                    MismatchLine {
                        frequency_hz: 250.0e6,
                        relative_power: 0.008,
                    },
                    MismatchLine {
                        frequency_hz: -250.0e6,
                        relative_power: 0.008,
                    },
                ],
                ..FabryPerotSettings::default()
            },
            oracle: None,
        }
    }

    /// 4 dB squeezed sidebands at 10.25 MHz split with 95% visibility and
    /// verified by a 90%-visibility Bell-type measurement.
    pub fn experiment_b() -> Self {
        Self {
            analysis_frequency_hz: 10.25e6,
            source: SourceConfig::Squeezed {
                squeezing_db: 4.0,
                antisqueezing_db: 4.0,
                excess_phase_db: 0.0,
                carrier: 1.0,
            },
            umzi: UmziSettings {
                delay_s: None,
                lock: LockSetting::default(),
                visibility: 0.95,
            },
            detection: DetectionSettings {
                bell_visibility: 0.90,
                ..DetectionSettings::default()
            },
            fabry_perot: FabryPerotSettings::default(),
            oracle: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.analysis_frequency_hz.is_nan() || self.analysis_frequency_hz <= 0.0 {
            return Err(Error::Config(
                "analysis_frequency_hz must be positive".into(),
            ));
        }
        for (name, v) in [
            ("umzi.visibility", self.umzi.visibility),
            (
                "detection.homodyne_visibility",
                self.detection.homodyne_visibility,
            ),
            (
                "detection.quantum_efficiency",
                self.detection.quantum_efficiency,
            ),
            ("detection.bell_visibility", self.detection.bell_visibility),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1]")));
            }
        }
        if let SourceConfig::Squeezed {
            squeezing_db,
            antisqueezing_db,
            excess_phase_db,
            ..
        } = &self.source
        {
            // uncertainty: v+ v- >= 1 before excess noise is even added
            if antisqueezing_db < squeezing_db {
                return Err(Error::Config(format!(
                    "antisqueezing_db ({antisqueezing_db}) must be at least squeezing_db ({squeezing_db})"
                )));
            }
            if *excess_phase_db < 0.0 {
                return Err(Error::Config("excess_phase_db must be non-negative".into()));
            }
        }
        self.umzi.lock.resolve()?;
        Ok(())
    }

    fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.analysis_frequency_hz
    }

    fn tau(&self) -> f64 {
        self.umzi
            .delay_s
            .unwrap_or(1.0 / (4.0 * self.analysis_frequency_hz))
    }

    pub fn analysis_setup(&self) -> Result<AnalysisSetup<f64>> {
        AnalysisSetup::new(self.omega(), self.tau(), self.umzi.lock.resolve()?.phi())
    }

    pub fn umzi_config(&self) -> Result<UmziConfig<f64>> {
        UmziConfig::new(self.tau(), self.umzi.lock.resolve()?, self.umzi.visibility)
    }

    /// Quadrature variances of the squeezed source in linear units, excess
    /// phase noise folded into the anti-squeezed quadrature.
    pub fn squeezed_variances(&self) -> Option<(f64, f64)> {
        match self.source {
            SourceConfig::Squeezed {
                squeezing_db,
                antisqueezing_db,
                excess_phase_db,
                ..
            } => Some((
                from_db(-squeezing_db),
                from_db(antisqueezing_db) + (from_db(excess_phase_db) - 1.0),
            )),
            _ => None,
        }
    }

    /// The input beam, labelled `in`.
    pub fn build_source(&self) -> Result<SidebandState<f64>> {
        let setup = self.analysis_setup()?;
        match &self.source {
            SourceConfig::Vacuum => Ok(SidebandState::vacuum(["in"], setup)),
            SourceConfig::ModulatedCoherent {
                carrier,
                beta,
                modulation,
            } => Ok(SidebandState::modulated_coherent(
                "in",
                Complex::new(*carrier, 0.0),
                Complex::new(*beta, 0.0),
                modulation.clone().into(),
                setup,
            )),
            SourceConfig::Squeezed { carrier, .. } => {
                let (v_plus, v_minus) = self.squeezed_variances().expect("squeezed source");
                SidebandState::squeezed("in", v_plus, v_minus, setup)?
                    .with_carrier("in", Complex::new(*carrier, 0.0))
            }
        }
    }

    pub fn detector(&self) -> Result<DetectorConfig<f64>> {
        DetectorConfig::new(
            self.detection.homodyne_visibility,
            self.detection.quantum_efficiency,
        )
    }
}

/// One line of a result table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub measurement: String,
    pub normalization: String,
    pub linear: f64,
    pub db: f64,
    pub oracle_mean: Option<f64>,
    pub oracle_se: Option<f64>,
}

impl ReportRow {
    fn new(scenario: &str, measurement: &str, normalization: &str, linear: f64) -> Self {
        Self {
            scenario: scenario.into(),
            measurement: measurement.into(),
            normalization: normalization.into(),
            linear,
            db: if linear > 0.0 {
                to_db(linear)
            } else {
                f64::NEG_INFINITY
            },
            oracle_mean: None,
            oracle_se: None,
        }
    }

    fn from_result(scenario: &str, r: &detection::MeasurementResult<f64>) -> Self {
        Self::new(
            scenario,
            &r.name,
            &r.normalization.to_string(),
            r.value_linear,
        )
    }

    /// Discrepancy between the analytic value and the oracle, in standard
    /// errors.
    pub fn z_score(&self) -> Option<f64> {
        match (self.oracle_mean, self.oracle_se) {
            (Some(m), Some(se)) if se > 0.0 => Some((self.linear - m) / se),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub scenario: String,
    pub rows: Vec<ReportRow>,
    pub traces: Vec<Trace<f64>>,
    pub verdict: Option<Verdict<f64>>,
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("scenario,measurement,normalization,linear,dB,oracle_mean,oracle_se\n");
        for r in &self.rows {
            let om = r.oracle_mean.map(|v| format!("{v:.9}")).unwrap_or_default();
            let os = r.oracle_se.map(|v| format!("{v:.3e}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{:.12e},{:.4},{},{}\n",
                r.scenario, r.measurement, r.normalization, r.linear, r.db, om, os
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.scenario);
        for r in &self.rows {
            out.push_str(&format!(
                "{:<42} {:>12.6} ({:>8.3} dB) [{}]",
                r.measurement, r.linear, r.db, r.normalization
            ));
            if let (Some(m), Some(se)) = (r.oracle_mean, r.oracle_se) {
                out.push_str(&format!("  oracle {m:.6} +- {se:.2e}"));
                if let Some(z) = r.z_score() {
                    out.push_str(&format!(" (z = {z:+.2})"));
                }
            }
            out.push('\n');
        }
        if let Some(v) = &self.verdict {
            out.push_str(&format!(
                "verdict: {} (sum criterion {:.4}, margin {:.2} dB)\n",
                if v.entangled {
                    "entangled"
                } else {
                    "not entangled"
                },
                v.duan_sum,
                v.margin_db
            ));
        }
        out
    }

    pub fn max_abs_z(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.z_score())
            .map(f64::abs)
            .fold(None, |acc, z| Some(acc.map_or(z, |a: f64| a.max(z))))
    }

    /// Every oracle-checked row agrees within three standard errors.
    pub fn oracle_consistent(&self) -> bool {
        self.max_abs_z().is_none_or(|z| z <= 3.0)
    }
}

fn attach_oracle(rows: &mut [ReportRow], run: &oracle::OracleRun<f64>) {
    for row in rows.iter_mut() {
        if let Some(e) = run.get(&row.measurement) {
            row.oracle_mean = Some(e.mean);
            row.oracle_se = Some(e.std_err);
        }
    }
}

fn port_refs(port: &[String]) -> Vec<&str> {
    port.iter().map(String::as_str).collect()
}

fn mismatch_spectral_lines(
    cfg: &ScenarioConfig,
    state: &SidebandState<f64>,
) -> Result<Vec<SpectralLine<f64>>> {
    let sideband_power = state.coherent("in")?.upper.norm_sqr();
    Ok(cfg
        .fabry_perot
        .mismatch_lines
        .iter()
        .map(|l| SpectralLine {
            frequency: l.frequency_hz,
            power: l.relative_power * sideband_power,
        })
        .collect())
}

/// Classical separation run: a bright modulated beam is split and both ports
/// are examined on the scanning cavity and by direct detection.
///
/// Produces three spectra (input, both ports), the per-port sideband
/// fractions, and the direct-detection beat power that appears once a
/// phase-modulated beam is reduced to a single sideband.
pub fn run_experiment_a(cfg: &ScenarioConfig) -> Result<Report> {
    cfg.validate()?;
    let scenario = "experiment-a";
    let state = cfg.build_source()?;
    if state.coherent("in")?.carrier.norm_sqr() <= 0.0 {
        return Err(Error::Config(
            "classical separation needs a bright modulated source".into(),
        ));
    }
    let umzi = build_umzi_network(&cfg.umzi_config()?)?;
    let fp = FabryPerotSpec::new(
        cfg.fabry_perot.fsr_hz,
        cfg.fabry_perot.linewidth_hz,
        cfg.fabry_perot.scan_range_hz,
        cfg.fabry_perot.resolution,
    )?;
    let extra = mismatch_spectral_lines(cfg, &state)?;

    let input_trace = spectrum::render_spectrum(&state, "in", &extra, &fp)?;
    let (t1, t2) = spectrum::render_separated_spectra(&state, "in", &umzi, &extra, &fp)?;

    let f_mod = cfg.analysis_frequency_hz;
    let c_in = state.coherent("in")?;
    let p_up_in = c_in.upper.norm_sqr();
    let p_lo_in = c_in.lower.norm_sqr();
    let (l1, l2) = spectrum::separated_line_powers(&state, "in", &umzi, &[])?;
    let line_power = |lines: &[SpectralLine<f64>], f: f64| {
        lines
            .iter()
            .find(|l| (l.frequency - f).abs() < 1.0)
            .map(|l| l.power)
            .unwrap_or(0.0)
    };

    let mut rows = vec![
        ReportRow::new(scenario, "input_upper_power", "absolute", p_up_in),
        ReportRow::new(scenario, "input_lower_power", "absolute", p_lo_in),
        ReportRow::new(
            scenario,
            "port1_upper_fraction",
            "relative-power",
            line_power(&l1, f_mod) / p_up_in,
        ),
        ReportRow::new(
            scenario,
            "port1_lower_fraction",
            "relative-power",
            line_power(&l1, -f_mod) / p_lo_in,
        ),
        ReportRow::new(
            scenario,
            "port2_upper_fraction",
            "relative-power",
            line_power(&l2, f_mod) / p_up_in,
        ),
        ReportRow::new(
            scenario,
            "port2_lower_fraction",
            "relative-power",
            line_power(&l2, -f_mod) / p_lo_in,
        ),
    ];

    // direct detection: a phase-modulated beam shows no beat until its
    // sidebands are separated
    let out = umzi.network.propagate(&state)?;
    rows.push(ReportRow::new(
        scenario,
        "input_beat_power",
        "absolute",
        state.modulation_signal_power("in")?,
    ));
    for (name, port) in [("port1_beat_power", &umzi.port1), ("port2_beat_power", &umzi.port2)] {
        let beat: f64 = port
            .iter()
            .map(|b| out.modulation_signal_power(b))
            .sum::<Result<f64>>()?;
        rows.push(ReportRow::new(scenario, name, "absolute", beat));
    }

    // each port's intensity noise stays at its own shot noise
    for (name, port) in [("port1_noise", &umzi.port1), ("port2_noise", &umzi.port2)] {
        let r = detection::direct_detection(&out, &port_refs(port))?;
        let mut row = ReportRow::from_result(scenario, &r);
        row.measurement = name.into();
        rows.push(row);
    }

    if let Some(o) = &cfg.oracle {
        let run = oracle::run_oracle(
            &state,
            Some(&umzi.network),
            &[
                OracleMeasurement::Direct {
                    name: "port1_noise".into(),
                    beams: umzi.port1.clone(),
                },
                OracleMeasurement::Direct {
                    name: "port2_noise".into(),
                    beams: umzi.port2.clone(),
                },
            ],
            &OracleConfig {
                samples: o.samples,
                seed: o.seed,
            },
        )?;
        attach_oracle(&mut rows, &run);
    }

    Ok(Report {
        scenario: scenario.into(),
        rows,
        traces: vec![input_trace, t1, t2],
        verdict: None,
    })
}

/// Quantum separation run: squeezed sidebands are split into two beams whose
/// joint photocurrents and Bell-type interference reveal the entanglement.
pub fn run_experiment_b(cfg: &ScenarioConfig) -> Result<Report> {
    cfg.validate()?;
    let scenario = "experiment-b";
    let (v_plus, v_minus) = cfg.squeezed_variances().ok_or_else(|| {
        Error::Config("entanglement run needs a squeezed source".into())
    })?;
    let state = cfg.build_source()?;
    let umzi = build_umzi_network(&cfg.umzi_config()?)?;
    let out = umzi.network.propagate(&state)?;
    let det = cfg.detector()?;

    let mut rows = vec![
        ReportRow::new(scenario, "input_v_plus", "one-output-QNL", v_plus),
        ReportRow::new(scenario, "input_v_minus", "one-output-QNL", v_minus),
    ];

    let half_pi = std::f64::consts::FRAC_PI_2;
    for (name, theta) in [("input_v_plus_homodyne", 0.0), ("input_v_minus_homodyne", half_pi)] {
        let r = detection::homodyne(&state, "in", theta, &det)?;
        let mut row = ReportRow::from_result(scenario, &r);
        row.measurement = name.into();
        rows.push(row);
    }

    for (name, port) in [("port1_noise", &umzi.port1), ("port2_noise", &umzi.port2)] {
        let r = detection::direct_detection(&out, &port_refs(port))?;
        let mut row = ReportRow::from_result(scenario, &r);
        row.measurement = name.into();
        rows.push(row);
    }

    let (sum, diff) = detection::joint_direct(&out, &port_refs(&umzi.port1), &port_refs(&umzi.port2))?;
    let mut sum_row = ReportRow::from_result(scenario, &sum);
    sum_row.measurement = "v_add_plus".into();
    let mut diff_row = ReportRow::from_result(scenario, &diff);
    diff_row.measurement = "v_sub_plus".into();
    rows.push(sum_row);
    rows.push(diff_row);

    let (bell_add, bell_sub) = detection::bell_measurement(
        &out,
        &port_refs(&umzi.port1),
        &port_refs(&umzi.port2),
        cfg.detection.bell_visibility,
    )?;
    let verdict = detection::entanglement_verdict(&bell_add, &bell_sub)?;
    let mut add_row = ReportRow::from_result(scenario, &bell_add);
    add_row.measurement = "bell_v_add_plus".into();
    let mut sub_row = ReportRow::from_result(scenario, &bell_sub);
    sub_row.measurement = "bell_v_sub_minus".into();
    rows.push(add_row);
    rows.push(sub_row);

    if let Some(o) = &cfg.oracle {
        let run = oracle::run_oracle(
            &state,
            Some(&umzi.network),
            &[
                OracleMeasurement::Direct {
                    name: "port1_noise".into(),
                    beams: umzi.port1.clone(),
                },
                OracleMeasurement::Direct {
                    name: "port2_noise".into(),
                    beams: umzi.port2.clone(),
                },
                OracleMeasurement::JointDirect {
                    name: "v_add_plus".into(),
                    port_a: umzi.port1.clone(),
                    port_b: umzi.port2.clone(),
                    sign: Sign::Sum,
                },
                OracleMeasurement::JointDirect {
                    name: "v_sub_plus".into(),
                    port_a: umzi.port1.clone(),
                    port_b: umzi.port2.clone(),
                    sign: Sign::Difference,
                },
            ],
            &OracleConfig {
                samples: o.samples,
                seed: o.seed,
            },
        )?;
        attach_oracle(&mut rows, &run);
    }

    Ok(Report {
        scenario: scenario.into(),
        rows,
        traces: Vec::new(),
        verdict: Some(verdict),
    })
}

/// Delay-line table for a pulsed source: the first `max_n` valid
/// (frequency, arm length) pairs, plus the best match for a requested
/// measurement frequency.
pub struct TimingReport {
    pub rep_rate: f64,
    pub configs: Vec<timing::TimingConfig<f64>>,
    pub nearest: Option<timing::TimingTarget<f64>>,
}

pub fn run_timing(rep_rate_hz: f64, target_hz: Option<f64>, max_n: u64) -> Result<TimingReport> {
    let spec = PulseTrainSpec::new(rep_rate_hz)?;
    let configs = (1..=max_n)
        .map(|n| timing::valid_measurement_frequency(&spec, n))
        .collect::<Result<_>>()?;
    let nearest = match target_hz {
        Some(f) => Some(timing::nearest_valid_config(&spec, f)?),
        None => None,
    };
    Ok(TimingReport {
        rep_rate: rep_rate_hz,
        configs,
        nearest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Homodyne angle on the first output, radians.
    Theta,
    /// Interferometer visibility.
    Visibility,
    /// Source squeezing strength, dB (anti-squeezing kept equal).
    SqueezingDb,
}

/// One observable against a swept parameter, endpoints inclusive.
pub fn run_sweep(
    cfg: &ScenarioConfig,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<Report> {
    cfg.validate()?;
    if steps < 2 {
        return Err(Error::Config("sweep needs at least 2 steps".into()));
    }
    let scenario = "sweep";
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let value = from + (to - from) * i as f64 / (steps - 1) as f64;
        let (name, linear, norm) = match param {
            SweepParam::Theta => {
                let state = cfg.build_source()?;
                let umzi = build_umzi_network(&cfg.umzi_config()?)?;
                let out = umzi.network.propagate(&state)?;
                let r = detection::homodyne(&out, "out1", value, &cfg.detector()?)?;
                (format!("homodyne_out1@theta={value:.6}"), r.value_linear, "one-output-QNL")
            }
            SweepParam::Visibility => {
                if !(value > 0.0 && value <= 1.0) {
                    return Err(Error::Config("visibility sweep must stay in (0, 1]".into()));
                }
                let mut c = cfg.clone();
                c.umzi.visibility = value;
                let state = c.build_source()?;
                let umzi = build_umzi_network(&c.umzi_config()?)?;
                let out = umzi.network.propagate(&state)?;
                let r = detection::direct_detection(&out, &port_refs(&umzi.port1))?;
                (format!("port1_noise@visibility={value:.6}"), r.value_linear, "one-output-QNL")
            }
            SweepParam::SqueezingDb => {
                let mut c = cfg.clone();
                match &mut c.source {
                    SourceConfig::Squeezed {
                        squeezing_db,
                        antisqueezing_db,
                        ..
                    } => {
                        *squeezing_db = value;
                        *antisqueezing_db = value.max(*antisqueezing_db);
                    }
                    _ => {
                        return Err(Error::Config(
                            "squeezing sweep needs a squeezed source".into(),
                        ))
                    }
                }
                let state = c.build_source()?;
                let umzi = build_umzi_network(&c.umzi_config()?)?;
                let out = umzi.network.propagate(&state)?;
                let (sum, _) = detection::joint_direct(
                    &out,
                    &port_refs(&umzi.port1),
                    &port_refs(&umzi.port2),
                )?;
                (format!("v_add_plus@squeezing_db={value:.6}"), sum.value_linear, "two-output-QNL")
            }
        };
        rows.push(ReportRow::new(scenario, &name, norm, linear));
    }
    Ok(Report {
        scenario: scenario.into(),
        rows,
        traces: Vec::new(),
        verdict: None,
    })
}
