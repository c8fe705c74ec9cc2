//! Command-line interface for the table-to-graph-to-text pipeline: extract
//! star graphs, run the three-stage generation pipeline, build training
//! datasets, evaluate generations, and measure rater agreement.
//!
//! Exit codes: 0 success, 1 input error, 2 verification failure, 3 partial
//! pipeline failure.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod inputs;
pub mod jsonl;
pub mod render;

use args::{Cli, Command};
use error::CliError;

/// Runs the parsed command.
pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract(args) => commands::extract::run(args),
        Command::Run(args) => commands::run::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Ablate(args) => commands::ablate::run(args),
        Command::BuildDataset(args) => commands::build_dataset::run(args),
        Command::Agreement(args) => commands::agreement::run(args),
    }
}
