//! File formats, configuration and command execution for the `mvmfdr` CLI.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{parallel_monte_carlo, run, Command};
pub use config::{parse_config, parse_config_str, CovarianceChoice, OutputFormat, RunConfig};
pub use error::{CliError, CliResult};
