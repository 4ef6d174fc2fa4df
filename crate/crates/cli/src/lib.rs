//! Batch surface for `dnls-core`: configuration files, single runs, sweeps,
//! verification reports and plot data.
//!
//! The `dnls` binary is a thin wrapper over the functions here.

pub mod config;
pub mod exponents_cmd;
pub mod plot;
pub mod run;
pub mod series_csv;
pub mod sweep;

use std::io;
use std::path::Path;

use thiserror::Error;

pub use config::{parse_config, parse_config_str, ConfigError, ParsedConfig};
pub use plot::{plot_data, plotdata_dir, PlotKind};
pub use run::{load_run, run_to_dir, verify_dir, RunManifest, RunOutcome};
pub use sweep::{parse_sweep, parse_sweep_str, run_sweep, SweepSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Setup(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}
