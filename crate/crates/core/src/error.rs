use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision unreachable: need enumeration radius {required}, max_radius is {max_radius}")]
    PrecisionUnreachable { required: usize, max_radius: usize },

    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    #[error("homology basis failure: {reason} (residual {residual:.3e})")]
    BasisFailure { reason: String, residual: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    /// Precision failures get their own process exit code in the CLI.
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::PrecisionUnreachable { .. })
    }
}
