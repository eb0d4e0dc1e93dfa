//! Experiment runner, file formats and command-line support for
//! [`seqfront_core`].

pub mod check;
pub mod config;
pub mod error;
pub mod report;
pub mod runner;

pub use error::{CliError, Result};
