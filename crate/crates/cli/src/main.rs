//! `pseudoboson diagonalize|verify|statmech|figure --config <path>`
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 spectrum not real
//! and simple, 3 verification failure.

// `!(x <= tol)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pseudoboson::verify::Tolerances;
use pseudoboson::Regime;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("spectrum of the dynamical matrix is not real and simple (regime {0:?})")]
    Regime(Regime),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Io(_) => 1,
            Self::Regime(_) => 2,
            Self::Verification(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pseudoboson",
    version,
    about = "Pseudo-boson diagonalization, verification and thermodynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues, ground energy and symplectic eigenbasis.
    Diagonalize(CommonArgs),
    /// Run every invariant check against the truncated Fock-space oracle.
    Verify(CommonArgs),
    /// Grand-canonical sweep: CSV plus summary JSON.
    Statmech(CommonArgs),
    /// The statmech sweep plus an SVG of the curves and the wedge.
    Figure(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-mode Fock cutoff, overriding `fock.n_max`.
    #[arg(long)]
    n_max: Option<usize>,
    /// Uniform verification tolerance, overriding `tolerances`.
    #[arg(long)]
    tol: Option<f64>,
}

fn load(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(dir) = &args.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(n) = args.n_max {
        if n == 0 {
            return Err(CliError::Config("--n-max must be at least 1".into()));
        }
        cfg.fock.n_max = n;
    }
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Config(format!(
                "--tol must be finite and positive, got {tol}"
            )));
        }
        cfg.tolerances = Tolerances::uniform(tol);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Diagonalize(a) => commands::diagonalize(&load(&a)?),
        Command::Verify(a) => commands::verify(&load(&a)?),
        Command::Statmech(a) => commands::statmech(&load(&a)?),
        Command::Figure(a) => commands::figure(&load(&a)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
