//! Configuration, file output and subcommand runners for the `casimir`
//! command-line tool.

pub mod config;
pub mod output;
pub mod run;

use casimir_core::{Error as CoreError, ErrorKind};
use thiserror::Error;

pub use config::{ConfigError, ScenarioConfig};
pub use output::{Cell, Metadata, ResultRecord, Table};
pub use run::{apply_overrides, run, Overrides, Subcommand};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot read config file {path}: {source}")]
    ReadConfig { path: String, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{subcommand} does not support {kind:?} geometry")]
    Unsupported { subcommand: &'static str, kind: config::GeometryKind },
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{source} (eta = {eta:?})")]
    Degenerate { eta: [f64; 4], source: CoreError },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 0 success, 1 I/O, 2 invalid input, 3 numerical failure, 4
    /// unsupported degeneracy.
    pub fn exit_code(&self) -> i32 {
        let kind = |e: &CoreError| match e.kind() {
            ErrorKind::Domain => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Degeneracy => 4,
        };
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } | CliError::Parse(_) | CliError::Unsupported { .. } => 2,
            CliError::Core(e) | CliError::Degenerate { source: e, .. } => kind(e),
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}
