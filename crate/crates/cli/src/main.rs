//! `dynex`: closed-form curves, exact and Monte Carlo estimates, and the verification suite.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed")]
    Verification,
    #[error("preimage budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Core(#[from] dynex_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification => 2,
            CliError::Config(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "dynex", version, about = "Multivariate extremes of chaotic maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// theta, D, Gamma and G of a preset along the simplex.
    ClosedForm(Common),
    /// Exact gamma_hat, theta and anti-clustering sums over the (n, q, tau) lattice.
    Exact(Common),
    /// Block-maxima and runs estimates with standard errors.
    Mc(Common),
    /// Acceptance suite; exits 2 on any failure.
    Verify(VerifyArgs),
    /// Pickands functions of logistic models and bivariate presets.
    PickandsTable(Common),
    /// Anti-clustering partial sums.
    DeltaPrime(Common),
}

#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Preset id, e.g. LinkedPeriodic_3_2_2 (comma list or `all` where accepted).
    #[arg(long)]
    pub example: Option<String>,
    /// Experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Frequency vector `a,b[,c]`; repeat for a grid.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Vec<String>,
    /// Simplex step.
    #[arg(long)]
    pub alpha_grid: Option<f64>,
    /// Block lengths, e.g. `2^10,2^14`.
    #[arg(long)]
    pub n_schedule: Option<String>,
    #[arg(long)]
    pub q_max: Option<usize>,
    #[arg(long)]
    pub trials: Option<String>,
    /// Orbit length for the runs estimator.
    #[arg(long)]
    pub orbit: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cost budget for exact anti-clustering sums.
    #[arg(long)]
    pub budget: Option<String>,
    /// `circle` or `interval`.
    #[arg(long)]
    pub boundary: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `exact`, `mc` or `both`.
    #[arg(long)]
    pub mode: Option<String>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// `cell:EXAMPLE:a[,b]` or `pickands:EXAMPLE`; repeatable.
    #[arg(long)]
    pub fault: Vec<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::ClosedForm(c) => commands::closed_form(&c),
        Command::Exact(c) => commands::exact(&c),
        Command::Mc(c) => commands::mc(&c),
        Command::Verify(v) => commands::verify(&v),
        Command::PickandsTable(c) => commands::pickands_table(&c),
        Command::DeltaPrime(c) => commands::delta_prime(&c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Verification) {
                eprintln!("dynex: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}
