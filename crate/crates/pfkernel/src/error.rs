use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("accuracy error: {message} (best estimate {best})")]
    Accuracy { message: String, best: Complex64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn accuracy(msg: impl Into<String>, best: Complex64) -> Self {
        Error::Accuracy { message: msg.into(), best }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
