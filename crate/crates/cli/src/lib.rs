//! Batch front-end for purity experiments: reads a JSON experiment
//! configuration, runs one command and writes a CSV or JSON result table.

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{execute, Command};
pub use config::{ExperimentConfig, Format};
pub use error::CliError;
pub use table::{Metadata, ResultTable, Values};

#[derive(Debug, Parser)]
#[command(name = "lrqc", version, about = "Purity dynamics of local random quantum circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Swap-algebra purity trajectory with its infinite-time limit.
    Evolve(RunArgs),
    /// Closed-form spectrum, gap and purity of the 1D chain.
    Path1d(RunArgs),
    /// Spectral gap of the ensemble map, optionally over a size sweep.
    Gap(RunArgs),
    /// Monte Carlo state-vector estimate against the exact trajectory.
    Oracle(RunArgs),
    /// Analytic constants and bounds for the configured model.
    Bounds(RunArgs),
    /// Predicted vs measured fixed-space dimensions.
    Fixcheck(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides run.seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides run.samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Overrides output.path; stdout when neither is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides output.format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl CliCommand {
    fn split(&self) -> (Command, &RunArgs) {
        match self {
            CliCommand::Evolve(a) => (Command::Evolve, a),
            CliCommand::Path1d(a) => (Command::Path1d, a),
            CliCommand::Gap(a) => (Command::Gap, a),
            CliCommand::Oracle(a) => (Command::Oracle, a),
            CliCommand::Bounds(a) => (Command::Bounds, a),
            CliCommand::Fixcheck(a) => (Command::Fixcheck, a),
        }
    }
}

/// Loads the configuration and applies command-line overrides.
pub fn load_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        config.run.seed = seed;
    }
    if let Some(samples) = args.samples {
        config.run.samples = samples;
    }
    if let Some(out) = &args.out {
        config.output.path = Some(out.clone());
    }
    if let Some(format) = args.format {
        config.output.format = format;
    }
    Ok(config)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (command, args) = cli.command.split();
    let config = load_config(args)?;
    let path = config.output.path.clone();
    // the destination is not part of the experiment, so reruns into
    // different files still produce identical bytes
    let mut echoed = config.clone();
    echoed.output.path = None;
    let table = execute(command, &echoed)?;
    output::write_table(&table, config.output.format, path.as_deref())
}
