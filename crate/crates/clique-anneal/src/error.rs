//! Crate-wide error type with stable process exit codes.

use thiserror::Error;

/// All failure modes surfaced to callers and, via [`Error::exit_code`], to the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad flags, missing required options, malformed config.
    #[error("usage: {0}")]
    Usage(String),

    /// Malformed or inconsistent input data (parse errors, unknown ids,
    /// degenerate datasets).
    #[error("data: {0}")]
    Data(String),

    /// Numerical failure (non-finite tensor, point outside the ball).
    #[error("numeric: {0}")]
    Numeric(String),

    /// A configured work budget was exceeded (e.g. clique-count cap).
    #[error("budget: {0}")]
    Budget(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure, 4 budget exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Data(_) | Error::Io(_) => 2,
            Error::Numeric(_) => 3,
            Error::Budget(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
