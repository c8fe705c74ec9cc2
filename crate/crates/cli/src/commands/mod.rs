//! Subcommand implementations.

pub mod ablate;
pub mod agreement;
pub mod build_dataset;
pub mod corpus;
pub mod evaluate;
pub mod extract;
pub mod run;
