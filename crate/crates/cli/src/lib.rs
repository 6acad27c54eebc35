//! Front end for the `ghostsim` binary: config files, commands and writers.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_eraser, cmd_pattern, cmd_sweep, cmd_validate, RunOptions, ValidationReport};
pub use config::{emit_config, parse_config, parse_config_with, Mode, RunConfig, SweepParam, SweepSpec};
pub use error::CliError;
pub use output::Summary;
