use thiserror::Error;

/// Errors produced by model construction, evaluation and the CLI layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Quadrature or tail refinement did not settle; carries the best estimate available.
    #[error("no convergence ({reason}): best estimate {estimate} +/- {error_bound}")]
    NonConvergence {
        estimate: f64,
        error_bound: f64,
        reason: String,
    },

    #[error("integrand returned NaN at x = {at}")]
    NanIntegrand { at: f64 },

    #[error("invalid system: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("conditioning event has probability {probability:e}, too small to condition on")]
    NullConditioning { probability: f64 },

    #[error("copula density is improper: minimum corner density {} < 0", round12(*.min_corner))]
    ImproperDensity { min_corner: f64 },

    #[error("rejection sampler acceptance rate {rate:e} is below 1e-3")]
    Efficiency { rate: f64 },

    #[error("only {count} draws satisfy the conditioning event `{event}` (need at least 100)")]
    InsufficientConditioning { event: String, count: usize },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Rounds to 12 decimals so sums of parameters print as written.
fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
