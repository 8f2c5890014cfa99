use thiserror::Error;

/// Errors raised by model construction, rate evaluation and the sweep harness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Matrix or parameter dimensions are incompatible.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// A scalar argument lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),
    /// A factorization or evaluation failed numerically.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A sweep configuration is malformed.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension(_) | Error::Domain(_) | Error::Config(_) => 1,
            Error::Numerical(_) => 2,
            Error::Io(_) => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
