//! Command-line front end: `relay-dmt analytic|simulate|compare`.

pub mod commands;
pub mod config;
pub mod files;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_analytic, cmd_compare, cmd_simulate, script_path, sidecar_path, Simulation};
pub use config::{CompareConfig, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNRELIABLE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Csv(_) => EXIT_IO,
            CliError::Config(_) | CliError::Model(_) => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "relay-dmt", version, about = "Diversity-multiplexing tradeoff of multi-hop MIMO relay networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON run configuration
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the configured seed
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a closed-form tradeoff curve
    Analytic(RunArgs),
    /// Monte Carlo outage sweep with a diversity fit
    Simulate(RunArgs),
    /// Merge curve files and emit a gnuplot script
    Compare(RunArgs),
}

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Analytic(a) => {
            let sc = Scenario::from_json(&read_config(&a.config)?)?;
            cmd_analytic(&sc, &a.out)?;
            Ok(EXIT_OK)
        }
        Command::Simulate(a) => {
            let sc = Scenario::from_json(&read_config(&a.config)?)?;
            let sim = cmd_simulate(&sc, a.seed, &a.out)?;
            if sim.fit.reliable {
                Ok(EXIT_OK)
            } else {
                eprintln!(
                    "warning: exponent fit unreliable ({} usable points)",
                    sim.fit.points_used
                );
                Ok(EXIT_UNRELIABLE)
            }
        }
        Command::Compare(a) => {
            let cfg = CompareConfig::from_json(&read_config(&a.config)?)?;
            let base = a.config.parent().unwrap_or(Path::new("."));
            cmd_compare(&cfg, base, &a.out)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("relay-dmt: {e}");
            e.exit_code()
        }
    }
}
