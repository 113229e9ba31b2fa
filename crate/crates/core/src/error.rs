use thiserror::Error;

/// Errors raised by state construction, channels and criteria.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A quadrature used for conditioning or regression has (numerically) zero variance.
    #[error("degenerate probe: {0}")]
    DegenerateProbe(String),
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    /// A channel with zero transmission carries nothing to the receiver.
    #[error("no channel: {0}")]
    NoChannel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
