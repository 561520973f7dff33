use thiserror::Error;

/// Errors shared across the matching library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("edges share an endpoint: ({0}, {1}) and ({2}, {3})")]
    SharedEndpoint(usize, usize, usize, usize),

    #[error("index out of range: {0}")]
    IndexOutOfRange(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("instance exceeds size limit: {got} > {cap}")]
    SizeLimit { got: usize, cap: usize },

    #[error("generation capacity exceeded: extent holds {capacity} points, requested {requested}")]
    Capacity { capacity: u128, requested: usize },

    #[error("sampling produced an empty dataset; retry with a different seed")]
    ResampleNeeded,

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
