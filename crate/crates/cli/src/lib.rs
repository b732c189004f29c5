//! Experiment harness for the logistic birth-death process.
//!
//! A run reads an [`spec::ExperimentSpec`], expands its parameter grid, runs
//! one of the [`studies`] and renders the resulting [`table::Table`] as CSV
//! or JSON.

pub mod error;
pub mod spec;
pub mod studies;
pub mod table;

pub use error::{CliError, Result};
pub use spec::ExperimentSpec;
pub use studies::{run, Command};
pub use table::Table;
