use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {k} is outside the cached horizon 1..={k_max}")]
    Horizon { k: u64, k_max: usize },

    #[error("value {target} cannot be bracketed: function stays below it up to x = {reached}")]
    Range { target: f64, reached: f64 },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid gauge ladder: {0}")]
    InvalidGauge(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index pair ({a}, {b}) is out of range for grid resolution {m}")]
    IndexOutOfRange { a: usize, b: usize, m: usize },

    #[error("intervals overlap or are out of order at position {0}")]
    Overlap(usize),

    #[error("grid resolution error: {0}")]
    Resolution(String),

    #[error("hypothesis violated at index {index}: {reason}")]
    Hypothesis { index: u64, reason: String },

    #[error("construction infeasible at level {level}: {reason}")]
    Infeasible { level: usize, reason: String },

    #[error("inequality chain failed at level {level}: {detail}")]
    ChainFailure { level: usize, detail: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("bracket search failed: {0}")]
    Bracket(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors that signal a mathematical hypothesis or feasibility
    /// failure rather than bad input or I/O.
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::Hypothesis { .. } | Error::Infeasible { .. } | Error::ChainFailure { .. }
        )
    }
}
