use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input failed a structural check (Hermiticity, PSD, normalization, shapes).
    #[error("validation error: {0}")]
    Validation(String),

    /// Scalar argument outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A constructed object failed its own self-test.
    #[error("construction error: {0}")]
    Construction(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
