use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Shapes, sizes or counts do not satisfy an operation's contract.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("scene generation failed (rule {rule}): {detail}")]
    Generation { rule: &'static str, detail: String },

    #[error("invalid scene: {0}")]
    Validation(String),

    #[error("integrity check failed for {path}: expected sha256 {expected}, found {found}")]
    Integrity {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("sample {id}: file not found: {path}")]
    NotFound { id: String, path: PathBuf },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image encoding error: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
