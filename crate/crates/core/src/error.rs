use thiserror::Error;

/// Errors raised by filters, analysis routines and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum} (deviation {deviation:e})")]
    RowSumViolation { row: usize, sum: f64, deviation: f64 },

    #[error("network must have at least one node")]
    ZeroNodes,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("graph has {expected} nodes but {actual} per-node inputs were given")]
    GraphSizeMismatch { expected: usize, actual: usize },

    #[error("weight ({row}, {col}) is nonzero but the nodes are not adjacent")]
    NotAdjacent { row: usize, col: usize },

    #[error("non-finite input")]
    NonFiniteInput,

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("matrix is singular or ill-conditioned (condition number {0:e})")]
    SingularMatrix(f64),

    #[error("input matrix {index} is not symmetric")]
    NonSymmetricInput { index: usize },

    #[error("sampler produced no data")]
    EmptySampler,

    #[error("variance must be nonnegative, got {0}")]
    NegativeVariance(f64),

    #[error("mean combined kernel must be positive, got {0}")]
    NonPositiveKernelMean(f64),

    #[error("sequence of length {len} is shorter than embedding length {required}")]
    SequenceTooShort { len: usize, required: usize },

    #[error("trace is empty")]
    EmptyTrace,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl Error {
    /// True for errors that stem from user configuration rather than from a
    /// numerical failure during a run.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::ConfigInvalid(_) | Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteInput)
    }
}

pub(crate) fn check_not_diverged(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NumericalBreakdown("filter state diverged to a non-finite value".into()))
    }
}
