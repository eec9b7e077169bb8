use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("observation has a non-finite component")]
    NonFinite,

    #[error("lambda = {lambda} is outside the admissible range (0, {cap}{close}")]
    LambdaOutOfRange {
        lambda: f64,
        cap: f64,
        close: char,
    },

    #[error("no estimate exists before the first observation")]
    NoEstimate,

    #[error("observation norm {norm} exceeds the bound B = {bound}")]
    OutOfBall { norm: f64, bound: f64 },

    #[error("{0} is outside the domain of the function")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
