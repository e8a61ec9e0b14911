//! `windward` command-line front end: run scenarios from JSON configs and
//! export plot-ready CSV files.

pub mod commands;
pub mod number;
pub mod output;
pub mod trajectory;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use commands::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "windward",
    version,
    about = "Look-ahead path-following guidance in strong wind"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario, write its trajectory CSV and print metrics JSON.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep a grid of initial (eta, e*) around a circle, one CSV per wind.
    PhasePortrait {
        config: PathBuf,
        /// Comma-separated wind speeds in m/s.
        #[arg(long, default_value = "0,7,13.5")]
        winds: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Command direction against wind speed for fixed look-ahead angles.
    Continuity {
        /// Sweep definition; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated angles between the anti-wind and look-ahead
        /// directions, degrees.
        #[arg(long)]
        nu: Option<String>,
        /// `min,max,steps` in m/s.
        #[arg(long)]
        wind_range: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the gain bound and compare against the error-dynamics oracle.
    Validate { config: PathBuf },
}

/// Caps the global rayon pool at `WINDWARD_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Some(raw) = std::env::var_os("WINDWARD_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .to_str()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("WINDWARD_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Simulate { config, out } => commands::simulate(&config, &out),
        Command::PhasePortrait { config, winds, out } => commands::phase_portrait(&config, &winds, &out),
        Command::Continuity {
            config,
            nu,
            wind_range,
            out,
        } => commands::continuity(config.as_deref(), nu.as_deref(), wind_range.as_deref(), &out),
        Command::Validate { config } => commands::validate(&config),
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("windward: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
