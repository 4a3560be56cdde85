use std::path::PathBuf;

use thiserror::Error;

/// Error type shared by every stage of the pipeline.
///
/// The variants map onto the CLI exit codes: validation problems exit
/// with 2, file problems with 3, and training/pipeline failures with 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Validation(String),

    #[error("training diverged at epoch {epoch}: {message}")]
    Divergence { epoch: usize, message: String },

    #[error("document cannot be classified: all class scores are -inf")]
    Unclassifiable,

    #[error("pipeline error: {0}")]
    Pipeline(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit code used by the CLI: 2 validation, 3 I/O, 4 divergence/pipeline.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Unclassifiable => 2,
            Error::Io { .. } | Error::Parse { .. } => 3,
            Error::Divergence { .. } | Error::Pipeline(_) => 4,
        }
    }
}
