use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("box set excludes zero at index {index} (lower = {lower}, upper = {upper})")]
    BoxExcludesZero { index: usize, lower: f64, upper: f64 },

    #[error("sparsity bound s = {s} must satisfy 1 <= s <= n = {n}")]
    BadSparsityBound { s: usize, n: usize },

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("factorization failure: {0}")]
    FactorizationFailure(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid initialization strategy: {0}")]
    InvalidStrategy(String),

    #[error("oracle scale exceeded: {0}")]
    OracleScaleExceeded(String),

    #[error("bad dimensions: {0}")]
    BadDimensions(String),

    #[error("ground truth required but not available")]
    MissingGroundTruth,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
