//! Files, run configuration and the command-line front end for
//! [`matchpyramid_core`]: pair TSV loading, checkpoint files, plain-text
//! graymap export, and the `train` / `eval` / `predict` / `visualize` /
//! `gen-data` subcommands.

pub mod cli;
pub mod commands;
pub mod config;
mod error;
pub mod io;
pub mod pgm;

pub use error::{CliError, CliResult};
