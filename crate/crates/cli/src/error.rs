use std::path::PathBuf;

use crate::config::ConfigError;
use crate::curves_csv::CurveFileError;

/// Exit status for analytical outcomes such as an always-locked design or no
/// feasible plate gap.
pub const EXIT_INFEASIBLE: u8 = 1;
/// Exit status for unusable input: files, config, arguments.
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Curves(#[from] CurveFileError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_INPUT,
        }
    }
}
