//! Command-line runner for the sideband separation simulator.
//!
//! Exit codes: 0 success, 1 configuration error, 2 physics violation,
//! 3 analytic/oracle disagreement beyond three standard errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sideband_optics::scenario::{
    run_experiment_a, run_experiment_b, run_sweep, run_timing, OracleSettings, Report,
    ScenarioConfig, SweepParam,
};
use sideband_optics::Error;

#[derive(Parser)]
#[command(
    name = "sideband",
    version,
    about = "Simulate optical side-band separation on a delay interferometer"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Report,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Param {
    Theta,
    Visibility,
    SqueezingDb,
}

impl From<Param> for SweepParam {
    fn from(p: Param) -> Self {
        match p {
            Param::Theta => SweepParam::Theta,
            Param::Visibility => SweepParam::Visibility,
            Param::SqueezingDb => SweepParam::SqueezingDb,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Scenario TOML; defaults to the built-in scenario of the subcommand.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for CSV artifacts (results, spectra, resolved config).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Cross-check analytic values with a Monte-Carlo run of N samples.
    #[arg(long, value_name = "N")]
    oracle: Option<usize>,

    /// Seed for the Monte-Carlo oracle.
    #[arg(long, value_name = "S", default_value_t = 1)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = Format::Report)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Classical run: split a modulated bright beam, scan both ports.
    RunA(RunArgs),
    /// Quantum run: split squeezed side-bands, verify the entanglement.
    RunB(RunArgs),
    /// Valid (measurement frequency, arm length) pairs for a pulsed source.
    Timing {
        /// Pulse repetition rate, Hz.
        #[arg(long, default_value_t = 82.0e6)]
        rep_rate: f64,
        /// Report the closest valid configuration to this frequency, Hz.
        #[arg(long, value_name = "HZ")]
        target: Option<f64>,
        /// Table length (pulse-overlap index runs 1..=N).
        #[arg(long, default_value_t = 8)]
        max_n: u64,
        #[arg(long, value_enum, default_value_t = Format::Report)]
        format: Format,
    },
    /// Sweep one parameter of the quantum scenario.
    Sweep {
        #[command(flatten)]
        args: RunArgs,
        #[arg(long, value_enum)]
        param: Param,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::TooFewSamples(_)
        | Error::UnreachableFrequency(_) => 1,
        Error::Unphysical(_)
        | Error::UncertaintyViolation(_)
        | Error::ZeroCarrier(_)
        | Error::NormalizationMismatch { .. }
        | Error::UnknownBeam(_)
        | Error::Topology(_) => 2,
    }
}

fn load_config(args: &RunArgs, default: ScenarioConfig) -> Result<ScenarioConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            ScenarioConfig::from_toml_str(&text)?
        }
        None => default,
    };
    if let Some(samples) = args.oracle {
        cfg.oracle = Some(OracleSettings {
            samples,
            seed: args.seed,
        });
    }
    Ok(cfg)
}

fn write_artifacts(dir: &Path, cfg: &ScenarioConfig, report: &Report) -> Result<(), Error> {
    let io_err = |e: std::io::Error| Error::Config(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io_err)?;
    std::fs::write(dir.join("results.csv"), report.to_csv()).map_err(io_err)?;
    std::fs::write(dir.join("scenario.toml"), cfg.to_toml_string()?).map_err(io_err)?;
    for trace in &report.traces {
        let mut csv = String::from("frequency_hz,power\n");
        for (f, p) in &trace.points {
            csv.push_str(&format!("{f:.6e},{p:.9e}\n"));
        }
        std::fs::write(dir.join(format!("{}.csv", trace.name)), csv).map_err(io_err)?;
    }
    Ok(())
}

fn emit_report(args: &RunArgs, cfg: &ScenarioConfig, report: &Report) -> Result<u8, Error> {
    match args.format {
        Format::Csv => print!("{}", report.to_csv()),
        Format::Report => print!("{}", report.to_text()),
    }
    if let Some(dir) = &args.out {
        write_artifacts(dir, cfg, report)?;
    }
    if !report.oracle_consistent() {
        eprintln!(
            "oracle disagreement: max |z| = {:.2} standard errors",
            report.max_abs_z().unwrap_or(f64::NAN)
        );
        return Ok(3);
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Command::RunA(args) => {
            let cfg = load_config(&args, ScenarioConfig::experiment_a())?;
            let report = run_experiment_a(&cfg)?;
            emit_report(&args, &cfg, &report)
        }
        Command::RunB(args) => {
            let cfg = load_config(&args, ScenarioConfig::experiment_b())?;
            let report = run_experiment_b(&cfg)?;
            emit_report(&args, &cfg, &report)
        }
        Command::Timing {
            rep_rate,
            target,
            max_n,
            format,
        } => {
            let t = run_timing(rep_rate, target, max_n)?;
            match format {
                Format::Csv => {
                    println!("n,f_m_hz,delta_l_m");
                    for c in &t.configs {
                        println!("{},{:.6e},{:.6}", c.n, c.f_m, c.delta_l);
                    }
                }
                Format::Report => {
                    println!("rep rate {:.3} MHz", t.rep_rate / 1e6);
                    for c in &t.configs {
                        println!(
                            "n = {:<3} f_m = {:>10.4} MHz  delta_L = {:>8.3} m",
                            c.n,
                            c.f_m / 1e6,
                            c.delta_l
                        );
                    }
                }
            }
            if let Some(best) = &t.nearest {
                println!(
                    "nearest to target: n = {} (f_m = {:.4} MHz, delta_L = {:.3} m, off by {:.1} Hz)",
                    best.config.n,
                    best.config.f_m / 1e6,
                    best.config.delta_l,
                    best.error
                );
            }
            Ok(0)
        }
        Command::Sweep {
            args,
            param,
            from,
            to,
            steps,
        } => {
            let cfg = load_config(&args, ScenarioConfig::experiment_b())?;
            let report = run_sweep(&cfg, param.into(), from, to, steps)?;
            emit_report(&args, &cfg, &report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
