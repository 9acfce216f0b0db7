//! `h2ion`: runs one computation from a config file and writes CSV tables and
//! text reports. Exit codes: 0 success, 1 computation failure, 2 config error.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Overrides, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "h2ion", version, about = "Spin structure, shifts and cooling of H2+ and anti-H2+ in a Penning trap")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Random seed; overrides `seed` in the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Validate the configuration without computing anything.
    #[arg(long, global = true)]
    dry_run: bool,

    /// Coefficient table to use instead of the one named in the config.
    #[arg(long, global = true, value_name = "PATH")]
    coeff_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Exact and expansion energies of the N = 2 spin levels.
    Levels,
    /// Field sensitivities of every spin component, plus a field scan.
    Sensitivity,
    /// Systematic-shift budget for matter and antimatter.
    Budget,
    /// E2 Rabi frequencies and required intensities.
    Rabi,
    /// Line profiles for several interrogation linewidths.
    Lineshape,
    /// Sympathetic cooling: ensemble, single trajectory and cooling map.
    Cooling,
    /// Magnetic-bottle cancellation of the second-order Doppler shift.
    Bottle,
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::config("--config <PATH> is required"))?;
    let overrides = Overrides { out: cli.out.clone(), seed: cli.seed, coeff_file: cli.coeff_file.clone() };
    let cfg = RunConfig::load(path, &overrides)?;
    let command = match cli.command {
        Command::Levels => commands::levels,
        Command::Sensitivity => commands::sensitivity,
        Command::Budget => commands::budget,
        Command::Rabi => commands::rabi,
        Command::Lineshape => commands::lineshape,
        Command::Cooling => commands::cooling,
        Command::Bottle => commands::bottle,
    };
    command(&cfg, cli.dry_run)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(_) if cli.dry_run => {
            println!("config ok");
            ExitCode::SUCCESS
        }
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
