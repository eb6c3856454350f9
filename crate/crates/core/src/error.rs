use std::path::PathBuf;

use thiserror::Error;

use crate::sat::DimacsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid user-supplied settings (scenario, operator, target algorithm).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A target-algorithm run failed.
    #[error("evaluation failed on instance {instance}: {message}")]
    Evaluation { instance: String, message: String },

    #[error("landscape error: {0}")]
    Landscape(String),

    #[error(transparent)]
    Dimacs(#[from] DimacsError),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
