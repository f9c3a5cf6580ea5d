use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("value {value} is not on the grid ({grid})")]
    OffGrid { value: String, grid: String },

    #[error("{value} is not representable over denominator {denominator}")]
    NotRepresentable { value: String, denominator: i64 },

    #[error("invalid function class: {0}")]
    InvalidClass(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what} = {value} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("budget n = {n} too small, construction needs {needed} rounds")]
    BudgetTooSmall { needed: usize, n: usize },

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_check(what: &'static str, value: u64, cap: u64) -> Result<()> {
    if value > cap {
        Err(Error::CapExceeded { what, value, cap })
    } else {
        Ok(())
    }
}
