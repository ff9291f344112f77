use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension n = {0} (only n = 2 and n = 3 are implemented)")]
    UnsupportedDimension(usize),

    #[error("harmonic index out of range: degree {degree}, index {index} (valid 1..={count})")]
    IndexOutOfRange {
        degree: usize,
        index: usize,
        count: usize,
    },

    #[error("quadrature exact to degree {available} but degree {required} is required")]
    InsufficientExactness { required: usize, available: usize },

    #[error("tensor rank {0} is too small for a trace reduction")]
    RankTooSmall(usize),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("halfspace intersection is unbounded")]
    Unbounded,

    #[error("halfspace intersection has empty interior")]
    EmptyInterior,

    #[error("measure is not full-dimensional")]
    NotFullDimensional,

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("optimizer did not converge after {iterations} iterations ({detail})")]
    NoConvergence { iterations: usize, detail: String },

    #[error("no exact fit found: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NoExactFit { residual: f64, tolerance: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
