//! Config-driven experiments on top of the `marketdyn` library.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{CliError, Outcome, RunOptions};
pub use config::{parse_config, ConfigError, ConfigErrors, ExperimentConfig};
