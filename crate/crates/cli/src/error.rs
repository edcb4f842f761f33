use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    /// Bad parameters or malformed input.
    #[error("{0}")]
    Domain(String),

    #[error(transparent)]
    Core(#[from] bootcorr::Error),

    /// The regularized matrix is not positive-definite.
    #[error("averaged matrix is not positive-definite (smallest eigenvalue {smallest:e})")]
    NotPositiveDefinite { smallest: f64 },
}

impl CliError {
    /// 0 success, 1 I/O, 2 domain or usage, 3 not positive-definite.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Domain(_) | CliError::Core(_) => 2,
            CliError::NotPositiveDefinite { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
