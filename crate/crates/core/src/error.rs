use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("non-positive close {value} on {date}")]
    NonPositiveClose { date: NaiveDate, value: f64 },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("insufficient data: need at least {needed} observations, got {actual}")]
    InsufficientData { needed: usize, actual: usize },

    #[error("degenerate series: {0}")]
    DegenerateSeries(&'static str),

    #[error(
        "window of length {window} centered at {center} does not fit in a series of length {len}"
    )]
    WindowBounds {
        center: usize,
        window: usize,
        len: usize,
    },

    /// The window holds no strictly positive or no non-positive return.
    #[error("degenerate window: positive or non-positive set is empty")]
    DegenerateWindow,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
}
