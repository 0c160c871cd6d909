use thiserror::Error;

/// Errors surfaced by distribution construction, model validation and the
/// analysis operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// An operation was asked for outside the regime where it is defined
    /// (e.g. the limiting degree distribution with infinite-mean weights).
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
