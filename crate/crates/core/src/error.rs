use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("a distance space needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("negative or non-finite distance at ({0}, {1})")]
    InvalidEntry(usize, usize),
    #[error("nonzero diagonal entry at {0}")]
    NonzeroDiagonal(usize),
    #[error("point {0} is the zero vector, cosine distance is undefined")]
    ZeroVector(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("triangle inequality violated by ({0}, {1}, {2})")]
    NotMetric(usize, usize, usize),
    #[error("element {0} is outside the ground set")]
    ElementOutOfRange(usize),
    #[error("sets must be disjoint")]
    Overlap,
    #[error("set has zero mass")]
    ZeroMass,
    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),
    #[error("slice {alpha} outside 1..={rank}")]
    AlphaOutOfRange { alpha: usize, rank: usize },
    #[error("window of {0} elements exceeds the brute-force limit of {1}")]
    WindowTooLarge(usize, usize),
    #[error("ground set of {0} elements exceeds the limit of {1}")]
    TooLarge(usize, usize),
    #[error("distance is not of negative type (minimum eigenvalue {0:e})")]
    NotNegativeType(f64),
    #[error("point is not in the matroid polytope (slack {0:e})")]
    Infeasible(f64),
    #[error("point is not in the base polytope (mass {mass}, rank {rank})")]
    NotInBasePolytope { mass: f64, rank: usize },
    #[error("point has no fractional elements left")]
    AlreadyIntegral,
    #[error("random rounding exceeded {0} retries")]
    RetryCapExceeded(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// True for errors that signal a bug or numerical breakdown rather than
    /// bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_) | Error::Infeasible(_))
    }
}
