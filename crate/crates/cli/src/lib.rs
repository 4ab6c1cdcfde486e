//! Command-line front end for `chargesite`.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;

use clap::{Parser, Subcommand};

use crate::error::CliResult;

/// Env var read for the log filter (`error`, `warn`, `info`, `debug`, ...).
pub const LOG_ENV: &str = "CHARGESITE_LOG";

#[derive(Debug, Parser)]
#[command(name = "chargesite", version, about = "Reliability-aware EV charging station siting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic demand for the bundled stations.
    GenInstance(commands::GenInstanceArgs),
    /// Estimate station reliabilities over a sample-size sweep.
    Estimate(commands::EstimateArgs),
    /// Build and solve one model variant.
    Solve(commands::SolveArgs),
    /// Score a saved decision on fresh scenarios.
    Evaluate(commands::EvaluateArgs),
    /// Run a full experiment from a config file or manifest.
    Experiment(experiment::ExperimentArgs),
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::GenInstance(a) => commands::gen_instance(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Solve(a) => commands::solve(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Experiment(a) => experiment::run(a).map(|_| ()),
    }
}
