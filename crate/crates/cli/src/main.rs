use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use turbofan_core::OutputFormat;

mod commands;
mod render;

/// Design-point energy/exergy analysis, sweeps, cycle optimization and
/// TOPSIS ranking for separate-flow turbofans.
#[derive(Debug, Parser)]
#[command(name = "turbofan", version)]
pub struct Cli {
    /// Run configuration file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory searched for relative --config paths and for a default
    /// `turbofan.toml`.
    #[arg(long, global = true, env = "TURBOFAN_CONFIG_DIR")]
    pub config_dir: Option<PathBuf>,

    /// Output file; overrides `output.path` in the config.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// GA seed; overrides `optimize.ga.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for parallel evaluation.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Solve one design point and audit its exergy.
    Analyze,
    /// Sweep inlet temperature offset and fuel.
    Sweep,
    /// Run the GA and the grid cross-check for one objective.
    Optimize,
    /// Rank alternatives with TOPSIS.
    Rank,
    /// Check the model against the published reference results.
    Validate,
    /// Print a config file with every section at its default.
    DumpDefaults,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs {n}: {e}");
            return ExitCode::from(commands::EXIT_CONFIG);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
