use thiserror::Error;

/// Errors raised by the schedule, method and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} lies outside the admissible range {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("inner solver stopped after {work} iterations with gap {achieved:.3e} > requested {requested:.3e}")]
    InnerExhausted {
        achieved: f64,
        requested: f64,
        work: u64,
    },

    #[error("non-finite iterate at outer iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("io: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
