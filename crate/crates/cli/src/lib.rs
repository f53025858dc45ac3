//! Library behind the `imarkov` command-line tool: model files, subcommands
//! and the worked-example reproduction.

pub mod commands;
pub mod error;
pub mod examples;
pub mod model;

pub use error::{CliError, CliResult};
