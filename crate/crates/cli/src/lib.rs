//! Command-line front end for the Robust MOSS experiments: JSON
//! configuration, batch execution, CSV and SVG output, bound reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

pub use config::ExperimentConfig;
pub use error::CliError;
