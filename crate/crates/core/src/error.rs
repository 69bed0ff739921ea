use thiserror::Error;

/// Errors raised by the solvers and their supporting utilities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("length mismatch: expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("inverse iteration did not converge after {0} iterations")]
    NonConvergence(usize),

    #[error("truncation too short: |u(T-h)| = {0:e}")]
    TruncationTooShort(f64),

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("no root of the optimality integral on [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("Newton iteration diverged: {0}")]
    NewtonDivergence(String),

    #[error("weight 1 - eps*k*t is nonpositive on the grid (min {0:e})")]
    WeightNonPositive(f64),

    #[error("input is not converged (residual {0:e})")]
    UnconvergedInput(f64),

    #[error("consistency check failed: {0}")]
    ConsistencyViolation(String),

    #[error("curve is not simple: {0}")]
    NonSimpleCurve(String),

    #[error("curve smoothness violated: {0}")]
    SmoothnessViolation(String),

    #[error("segment out of range: {0}")]
    SegmentOutOfRange(String),

    #[error("winding search exceeded {0} evaluations")]
    WindingSearchRunaway(usize),
}

impl Error {
    /// True for errors caused by the caller's inputs rather than by a solver
    /// failing to converge.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidRange(_)
                | Error::LengthMismatch { .. }
                | Error::NonFinite(_)
                | Error::WeightNonPositive(_)
                | Error::NonSimpleCurve(_)
                | Error::SmoothnessViolation(_)
                | Error::SegmentOutOfRange(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
