use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod run;

use run::{CliError, RunContext};

/// Simulator for a two-crystal Type-I down-conversion source.
#[derive(Debug, Parser)]
#[command(name = "twocrystal", version, about)]
struct Cli {
    /// TOML configuration file. Built-in defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for every random draw in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Parent directory for run outputs.
    #[arg(long, global = true, default_value = "runs")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Propagation delays and decoherence parameter per crystal length.
    SourceReport,
    /// Coincidence rate versus signal polarizer angle, model and simulated.
    VisibilityScan,
    /// CHSH S(θ) curves and simulated measurements.
    Bell,
    /// Maximum-likelihood reconstruction from measured or simulated counts.
    Tomography,
    /// Single-count and coincidence interference fringes.
    Interference,
    /// Poisson counts for the 16 tomographic settings.
    SimulateCounts,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::SourceReport => "source-report",
            Command::VisibilityScan => "visibility-scan",
            Command::Bell => "bell",
            Command::Tomography => "tomography",
            Command::Interference => "interference",
            Command::SimulateCounts => "simulate-counts",
        }
    }
}

fn execute(cli: &Cli) -> Result<PathBuf, CliError> {
    let ctx = RunContext::prepare(
        cli.config.as_deref(),
        cli.seed,
        &cli.out,
        cli.command.name(),
    )?;
    match cli.command {
        Command::SourceReport => commands::source_report(&ctx),
        Command::VisibilityScan => commands::visibility_scan(&ctx),
        Command::Bell => commands::bell(&ctx),
        Command::Tomography => commands::tomography(&ctx),
        Command::Interference => commands::interference(&ctx),
        Command::SimulateCounts => commands::simulate_counts(&ctx),
    }?;
    Ok(ctx.dir().to_path_buf())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
