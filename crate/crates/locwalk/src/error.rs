use thiserror::Error;

/// Crate-wide error type.
///
/// `Config` is kept separate from the numeric/runtime variants because the
/// CLI maps it to exit code 2 while hard assertion failures map to exit 1.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated; the message names the
    /// offending parameter and the constraint.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// Configuration parsing/validation failure (CLI exit code 2).
    #[error("config error: {0}")]
    Config(String),

    /// No exact or rejection sampler is available for a density.
    #[error("no sampler available: {0}")]
    NoSampler(String),

    /// Iterative solver failed to reach its tolerance.
    #[error("solver did not converge after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },

    /// A numeric state became unusable (all weights -inf, corrupted walk
    /// state, non-finite intermediate).
    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
