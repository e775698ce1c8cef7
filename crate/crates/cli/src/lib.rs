//! Command-line front end for `lowrank-core`: matrix ingestion, selection
//! runs and JSON reports.

pub mod commands;
pub mod error;
pub mod io;
pub mod report;

pub use commands::{execute, run, Cli, Command};
pub use error::CliError;
pub use report::RunReport;
