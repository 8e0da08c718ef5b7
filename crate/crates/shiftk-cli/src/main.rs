//! `shiftk` — reproducible runs over the shift-K approximation library.
//!
//! Subcommands: `loss` (closed-form/quadrature/oracle sweeps with bounds),
//! `window` (frequency-window reproduction), `train` (copy-task training),
//! `verify` (the numerical invariant suite). Every run is driven by a single
//! JSON config; flags override the common fields. Exit codes: 0 ok,
//! 1 verification failure, 2 config error, 3 numeric error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    /// Carried by `verify` when checks fail; the report is still written.
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Verification(_) => ExitCode::from(1),
            CliError::Config(_) => ExitCode::from(2),
            CliError::Numeric(_) | CliError::Io(_) => ExitCode::from(3),
        }
    }
}

impl From<shiftk_core::Error> for CliError {
    fn from(e: shiftk_core::Error) -> Self {
        match e {
            shiftk_core::Error::Validation(msg) => CliError::Config(msg),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// JSON run configuration; omitted means the command's built-in default.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output path override (CSV or JSON depending on the command).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Seed override for every seeded field of the config.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads for sweeps (default: SHIFTK_THREADS or all cores).
    #[arg(long, env = "SHIFTK_THREADS")]
    pub threads: Option<usize>,

    /// Use the config's full-scale variant where it has one.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Parser)]
#[command(name = "shiftk", version, about = "Shift-K filters from diagonal linear recurrences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate losses and bounds over an (S, K, rho, alpha) sweep.
    Loss(CommonArgs),
    /// Reproduce the frequency-window behavior of the shift-K filter.
    Window(CommonArgs),
    /// Train the diagonal recurrence on synthetic copy tasks.
    Train(CommonArgs),
    /// Run the numerical invariant suite and emit a JSON report.
    Verify {
        #[command(flatten)]
        common: CommonArgs,

        /// Inject a perturbation of this size into the displacement check
        /// (negative control: the check must then fail).
        #[arg(long)]
        perturb_cauchy: Option<f64>,
    },
}

fn install_thread_pool(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Loss(common) => {
            install_thread_pool(common.threads)?;
            commands::loss::run(&common)
        }
        Command::Window(common) => {
            install_thread_pool(common.threads)?;
            commands::window::run(&common)
        }
        Command::Train(common) => {
            install_thread_pool(common.threads)?;
            commands::train::run(&common)
        }
        Command::Verify {
            common,
            perturb_cauchy,
        } => {
            install_thread_pool(common.threads)?;
            commands::verify::run(&common, perturb_cauchy)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shiftk: {e}");
            e.exit_code()
        }
    }
}
