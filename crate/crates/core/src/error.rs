use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation dimension must be at least 1")]
    EmptyDimension,

    #[error("kernel vector requires |omega| < 1, got |omega| = {0}")]
    KernelDomain(f64),

    #[error("g(0) must be nonzero")]
    SingularSymbol,

    #[error("symbol g must be analytic (only nonnegative indices), found index {0}")]
    NotAnalytic(i64),

    #[error("1/g is unbounded on the disk: requires |g1/g0| < 1, got {0}")]
    NonInvertibleSymbol(f64),

    #[error("requires 0 < |beta| < 1, got |beta| = {0}")]
    InvalidBeta(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("{0} is not supported in closed-form mode")]
    UnsupportedMode(String),

    #[error("power index {power} needs a truncation larger than {power}, got dim {dim}")]
    TruncationTooSmall { power: usize, dim: usize },

    #[error("resolvent requires |lambda| > 1, got |lambda| = {0}")]
    OutsideResolventDomain(f64),

    #[error("linear solve failed, condition estimate {cond:e}")]
    SingularSolve { cond: f64 },

    #[error("norm iteration did not converge, best estimate {best}")]
    NoConvergence { best: f64 },

    #[error("{failed} of {total} grid points failed to solve")]
    GridFailure { failed: usize, total: usize },

    #[error("slope fit needs at least 5 points, got {0}")]
    TooFewPoints(usize),

    #[error("malformed symbol: {0}")]
    SymbolSyntax(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical non-convergence, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::GridFailure { .. } | Error::SingularSolve { .. }
        )
    }
}
