//! Crate-wide error type.
//!
//! Variants group into the exit-code classes the CLI exposes: I/O and file
//! format problems, validation of inputs/parameters, and numeric failures.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file (bad magic, truncated header, size mismatch).
    #[error("format error: {0}")]
    Format(String),

    /// A file codec or layout we deliberately do not handle.
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// Precondition or invariant violation on arguments.
    #[error("validation error: {0}")]
    Validation(String),

    /// A computation produced non-finite or otherwise unusable values.
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit code class for the CLI: 2 for I/O and file-format problems,
    /// 3 for validation and numeric failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } | Error::Format(_) | Error::UnsupportedFormat(_) => 2,
            Error::Validation(_) | Error::Numeric(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
