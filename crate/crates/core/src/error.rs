use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension {got} is not supported here (need d >= {min})")]
    Dimension { got: usize, min: usize },
    #[error("invalid dyadic index ({i}, {j}, {k})")]
    InvalidIndex { i: u32, j: u32, k: u32 },
    #[error("envelope fit failed: only {found} envelope points (need at least {needed})")]
    EnvelopeFit { found: usize, needed: usize },
    #[error("unsupported test function: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
