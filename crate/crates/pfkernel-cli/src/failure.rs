//! Command failures and their exit codes.

use std::fmt;
use std::io;

#[derive(Debug)]
pub enum Failure {
    /// A check ran but did not pass (exit 1).
    Check(String),
    /// Invalid invocation or parameters (exit 2).
    Usage(String),
    /// Numerical or I/O failure during the computation (exit 3).
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Check(m) => write!(f, "check failed: {m}"),
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numeric(format!("I/O: {e}"))
    }
}

pub fn usage(e: impl fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn numeric(e: impl fmt::Display) -> Failure {
    Failure::Numeric(e.to_string())
}

pub type CmdResult = Result<(), Failure>;
