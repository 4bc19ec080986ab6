use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("weight structure: {0}")]
    Structure(String),
    #[error("monotonicity check failed: {0}")]
    Monotonicity(String),
    #[error("weight condition violated: {0}")]
    Assumption(String),
    #[error("out of scope: {0}")]
    Scope(String),
    #[error("logic error: {0}")]
    Logic(String),
    #[error("generation failed: {0}")]
    Generation(String),
    #[error("lp: {0}")]
    Lp(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
