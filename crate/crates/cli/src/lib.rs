//! Command-line front end for `tessel-core`: file formats, experiment
//! drivers and the `tessel` subcommands.

pub mod cli;
pub mod commands;
pub mod error;
pub mod experiments;
pub mod io;

pub use error::{CliError, CliResult};
