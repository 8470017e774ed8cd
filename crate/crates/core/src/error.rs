use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or configuration value violates its preconditions.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// An operation was called with incompatible arguments (grid or
    /// dimension mismatch, unresolved name, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// A target, basis function or profile produced a non-finite value.
    #[error("evaluation error: {0}")]
    Evaluation(String),
    /// A particle coordinate left the open cube (-1,1)^D.
    #[error("particle out of domain: {0}")]
    Domain(String),
    /// A linear-algebra step received or produced non-finite data.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Offline direction training could not reach its tolerance.
    #[error("training failed: {0}")]
    Training(String),
}

pub type Result<T> = std::result::Result<T, Error>;
