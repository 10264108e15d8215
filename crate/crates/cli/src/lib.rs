//! Library half of the `vlasov` binary: configuration, CSV runs, order
//! studies and gnuplot scripts.

pub mod config;
pub mod order;
pub mod plot;
pub mod run;

use thiserror::Error;
use vlasov_core::SimError;

pub use config::{parse_config, ConfigError, ModeCutoff, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(SimError),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit status: 2 configuration, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidParameter(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
