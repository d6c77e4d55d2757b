use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use motion_camouflage::scenario::config::GainSource;
use motion_camouflage::scenario::export::{self, CertificateRecord, ExportError, Metrics};
use motion_camouflage::scenario::sweep::{compare_guidance, sweep, sweep_csv};
use motion_camouflage::scenario::{run, ConfigError, ScenarioConfig, SimError};

/// Simulate and certify three-dimensional motion-camouflage pursuit.
#[derive(Parser)]
#[command(name = "mcsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario under MCPG and export the trajectory.
    Run {
        config: PathBuf,
        /// Trajectory CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Metrics JSON destination; printed to stdout when omitted.
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Print the gain certificate implied by a scenario.
    Certify { config: PathBuf },
    /// Run MCPG and range-scheduled PPNG side by side.
    CompareGuidance {
        config: PathBuf,
        /// Directory receiving mcpg.csv, ppng.csv and residual.csv.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Metrics JSON of the MCPG run, including the residual; printed to
        /// stdout when omitted.
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Tabulate time-to-target over a list of gains.
    Sweep {
        /// Comma-separated feedback gains.
        #[arg(long, value_delimiter = ',', required = true)]
        gain: Vec<f64>,
        config: PathBuf,
        /// Table destination; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<ExportError> for Failure {
    fn from(e: ExportError) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        if e.is_runtime() {
            Self::Runtime(e.to_string())
        } else {
            Self::Usage(e.to_string())
        }
    }
}

fn emit(text: &str, dest: Option<&Path>) -> Result<(), Failure> {
    match dest {
        Some(path) => Ok(export::write_text(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run {
            config,
            out,
            metrics,
        } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let s = cfg.resolve()?;
            let log = run(&cfg)?;
            if let Some(path) = out {
                export::write_csv(&log, path)?;
            }
            emit(&Metrics::new(&log, &s)?.to_json()?, metrics.as_deref())
        }
        Command::Certify { config } => {
            let mut cfg = ScenarioConfig::from_path(&config)?;
            if let GainSource::Explicit { r_o, .. } = cfg.gain {
                cfg.gain = GainSource::Certificate {
                    epsilon_o: export::DEFAULT_EPSILON,
                    r_o,
                    nu_max: None,
                };
            }
            let s = cfg.resolve()?;
            let c = s.certificate.expect("certificate source");
            let rec = CertificateRecord::new(&c, s.hypotheses.gamma0, s.hypotheses.r0_initial);
            let text = serde_json::to_string_pretty(&rec).map_err(ExportError::from)?;
            emit(&(text + "\n"), None)
        }
        Command::CompareGuidance {
            config,
            out_dir,
            metrics,
        } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let s = cfg.resolve()?;
            let c = compare_guidance(&cfg)?;
            export::write_csv(&c.mcpg, out_dir.join("mcpg.csv"))?;
            export::write_csv(&c.ppng, out_dir.join("ppng.csv"))?;
            let mut m = Metrics::new(&c.mcpg, &s)?;
            if !c.residuals.is_empty() {
                export::write_text(
                    out_dir.join("residual.csv"),
                    &export::residual_csv_string(&c.residuals)?,
                )?;
                m.equivalence_residual = Some(c.max_relative_residual());
            }
            emit(&m.to_json()?, metrics.as_deref())
        }
        Command::Sweep { gain, config, out } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            if let Some(bad) = gain.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
                return Err(Failure::Usage(format!("gain {bad} must be nonnegative")));
            }
            let rows = sweep(&cfg, &gain)?;
            emit(&sweep_csv(&rows), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
