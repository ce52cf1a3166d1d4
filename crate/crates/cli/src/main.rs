//! `teich`: command-line front end for the teich-core checks.
//!
//! Exit status is 0 when every check passes, 1 when a check fails or a
//! numerical procedure does not converge, and 2 for invalid input.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use teich_core::{Error, Exec};

#[derive(Parser, Debug)]
#[command(name = "teich", version, about, args_override_self = true, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// TOML file of flag values; they override the command line.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every randomized sweep.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads for parallel sweeps (0 keeps the default).
    #[arg(long, global = true, env = "TEICH_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Write reports into this directory instead of stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Format printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Global {
    pub fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a library surface as JSON.
    Surface(commands::SurfaceArgs),
    /// Train track operations.
    #[command(subcommand)]
    Tt(commands::TtCommand),
    /// Check norm and period derivatives against finite differences.
    VerifyDerivative(commands::DerivativeArgs),
    /// Projection and Busemann estimates along an axis in the upper half-plane.
    Sandbox(commands::SandboxArgs),
    /// Disjointness, coverage and sandwich checks of the sector scheme.
    Sectors(commands::SectorArgs),
    /// Orbit counts near the axis of a hyperbolic element, with cell measures.
    CountOrbit(commands::CountArgs),
    /// The net of an axis and its cells.
    NetPartition(commands::NetArgs),
    /// Measures of the exact, inner and outer cells.
    MeasureCells(commands::MeasureArgs),
    /// Area of tubes around the axis against orbit counts.
    Volume(commands::VolumeArgs),
}

/// Names of the checks that failed; empty on success.
pub type Failures = Vec<String>;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Precision(_) | Error::Sampling(_) | Error::Resource { .. } | Error::Canonicalization(_)) => 1,
        Some(Error::NonSmooth(_) | Error::Reconstruction(_) | Error::Mismatch(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let args = match config::merged_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    if let Err(e) = teich_core::Exec::configure_threads(cli.global.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("failed checks: {}", failures.join(", "));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
