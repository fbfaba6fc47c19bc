use thiserror::Error;

use crate::multigrid::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("empty operator")]
    Empty,

    #[error("dense materialization of n = {n} exceeds the cap of {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("fractional order {0} is outside the open interval (1, 2)")]
    InvalidAlpha(f64),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("source evaluated to {value} at x = {x}")]
    NonFiniteSource { x: f64, value: f64 },

    #[error("fine vector length {0} is not odd")]
    EvenLength(usize),

    #[error("operator of dimension {0} cannot be coarsened (need 2m+1 with m >= 1)")]
    NotCoarsenable(usize),

    #[error("level index {k} outside [{min}, {max}]")]
    LevelOutOfRange { k: u32, min: u32, max: u32 },

    #[error("diagonal entry {value} at row {row} is not positive")]
    NonPositiveDiagonal { row: usize, value: f64 },

    #[error("damping factor {omega} is inadmissible (need 0 < omega < {limit})")]
    InadmissibleOmega { omega: f64, limit: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("quadrature oracle requested for N = {n}; it is limited to N <= {limit}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),

    #[error("no convergence after {} iterations (last relative residual {:e})",
        .0.iterations, .0.residual_history.last().copied().unwrap_or(f64::NAN))]
    NotConverged(Box<SolveReport>),
}
