use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    /// A malformed or inconsistent part of a scene, located by its path.
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    pub fn invalid(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }
}
