use thiserror::Error;

/// Errors raised by the rod solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no sign change for root bracket {index}: [{lo}, {hi}]")]
    Bracket { index: usize, lo: f64, hi: f64 },
    #[error("pole lift for mode {index} did not converge: {reason}")]
    Convergence { index: usize, reason: String },
    #[error("accuracy target {target:e} missed, estimated error {estimate:e}")]
    Accuracy { estimate: f64, target: f64 },
    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
