use thiserror::Error;

/// Errors raised by the numerics library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Potential families the construction does not cover (types B, E, F).
    #[error("family {kind} is not supported: {reason}")]
    Deferred { kind: &'static str, reason: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("index {index} out of range (max {max})")]
    OutOfRange { index: usize, max: usize },

    /// A series or iteration failed to converge (including evaluation outside
    /// the radius of convergence).
    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("grid error: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
