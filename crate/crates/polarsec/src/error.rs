//! Front-end error type and exit codes.

use std::io;

use thiserror::Error;

use crate::config::ConfigError;
use crate::format::FormatError;

/// Anything the command-line front end can fail with.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration.
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    /// Library error.
    #[error(transparent)]
    Core(#[from] polarsec_core::Error),
    /// Malformed data file.
    #[error("{path}: {source}")]
    Format {
        /// File being read.
        path: String,
        /// Parse error.
        source: FormatError,
    },
    /// Construction output missing.
    #[error("{0} not found; run `polarsec construct` with the same config first")]
    MissingConstruction(String),
    /// File system failure.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: String,
        /// Underlying error.
        source: io::Error,
    },
    /// CSV writer failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit status: 2 config, 3 infeasible rate, 4 resource limit, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use polarsec_core::Error as E;
        match self {
            CliError::Config(ConfigError::Invalid(e))
            | CliError::Core(e)
            | CliError::Format { source: FormatError::Invalid(e), .. } => match e {
                E::InfeasibleRate { .. } => 3,
                E::ResourceLimit(_) => 4,
                E::InvalidArgument(_) | E::UnsupportedChannel(_) | E::UnsupportedConfiguration(_) => 2,
                E::UndefinedBound(_) => 1,
            },
            CliError::Config(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.as_ref().display().to_string();
        move |source| CliError::Io { path, source }
    }
}

/// Result alias for the front end.
pub type Result<T> = std::result::Result<T, CliError>;
