//! Command-line driver: `qmeasure <figure1|dpeak|evolve|oracle-check>
//! --config <path> [--out <dir>] [--threads N]`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid config, 3 unstable
//! pointer, 4 numerical non-convergence, 5 oracle deviation above tolerance.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
    Stability(String),
    Numerical(String),
    OracleDeviation { outcome: Outcome, deviation: f64, tolerance: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Stability(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::OracleDeviation { .. } => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Stability(m) => write!(f, "stability error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::OracleDeviation { deviation, tolerance, .. } => {
                write!(f, "oracle deviation {deviation:e} exceeds tolerance {tolerance:e}")
            }
        }
    }
}

impl From<qmeasure::Error> for CliError {
    fn from(e: qmeasure::Error) -> Self {
        match e {
            qmeasure::Error::Stability { .. } => CliError::Stability(e.to_string()),
            e if e.is_numerical() => CliError::Numerical(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qmeasure", version, about = "Decoherence time scales of a quantum measurement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.path`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Decoherence time against t_ent/eta for each spectral exponent.
    Figure1,
    /// Peak decoherence exponent on a time grid.
    Dpeak,
    /// Pointer marginals and coherences of the joint state at snapshot times.
    Evolve,
    /// Compare the Gaussian decoherence factor with a brute-force harmonic bath.
    OracleCheck,
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(msg) => {
            println!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("qmeasure: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let cfg = RunConfig::load(path)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        // A second initialization in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let dir = cli.out.clone().or_else(|| cfg.output.path.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let result = match cli.command {
        Command::Figure1 => commands::figure1(&cfg),
        Command::Dpeak => commands::dpeak(&cfg),
        Command::Evolve => commands::evolve(&cfg),
        Command::OracleCheck => commands::oracle_check(&cfg),
    };
    match result {
        Ok(outcome) => {
            output::write_all(&dir, &outcome.files)?;
            Ok(format!("{} -> {}", outcome.summary, dir.display()))
        }
        Err(CliError::OracleDeviation { outcome, deviation, tolerance }) => {
            output::write_all(&dir, &outcome.files)?;
            eprintln!("{}", outcome.summary);
            Err(CliError::OracleDeviation { outcome, deviation, tolerance })
        }
        Err(e) => Err(e),
    }
}
