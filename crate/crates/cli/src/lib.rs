//! Command-line front end: dataset manifests, on-disk descriptor and model
//! stores, reports, and the `srs-lbp` subcommands.

pub mod commands;
pub mod manifest;
pub mod report;
pub mod store;

pub use commands::{run, Cli, CliError};
