//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide error enum. The variants map onto the CLI exit codes:
/// argument/parse problems are usage errors, domain errors reject
/// mathematically invalid inputs, resource errors guard runaway
/// computations, numerical errors report failed convergence or overflow.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
