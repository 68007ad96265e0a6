use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by sampling, indexing, estimation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two sample points share identical coordinates; the Voronoi partition
    /// is undefined.
    #[error("duplicate points at indices {first} and {second}")]
    DuplicatePoint { first: usize, second: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {message}")]
    Csv { path: PathBuf, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
