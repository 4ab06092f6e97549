use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FkError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("t = {t} lies outside the domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("non-finite value at t = {0}")]
    NonFinite(f64),
    #[error("deviation profile is degenerate (perfect fit)")]
    PerfectFit,
    #[error("coincident knots at index {0}; stationarity analysis needs distinct knots")]
    CoincidentKnots(usize),
    #[error("interval ({p}, {q}) is not aligned with block subintervals")]
    NotBlockAligned { p: usize, q: usize },
    #[error("{count} unstable knots exceed the combinatorial limit of {limit}")]
    TooManyUnstable { count: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, FkError>;
