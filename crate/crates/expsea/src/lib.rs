//! Experiment runner for the `expsea-core` market simulator: TOML scenario files,
//! parallel replications, CSV/JSON reports and the `expsea` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod report;

pub use error::Error;
