//! Command-line driver for the three-state walk: config parsing, experiment
//! execution and artifact writing.

pub mod config;
pub mod experiment;

use std::path::Path;

pub use config::{parse_config, ConfigError, ExperimentConfig, InitialCoin, Model};
pub use experiment::{run_experiment, simulate, sweep, RunError, RunReport};

/// Reads and parses a config file. An unreadable file counts as a config error.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}
