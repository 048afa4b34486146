use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("table needs at least 2 edges, got {0}")]
    TooFewEdges(usize),
    #[error("length mismatch: {edges} edges need {} frequencies, got {weights}", edges.saturating_sub(1))]
    LengthMismatch { edges: usize, weights: usize },
    #[error("edges not strictly increasing at index {index}")]
    NonIncreasingEdges { index: usize },
    #[error("edge {index} is not finite (only the last edge may be +inf)")]
    NonFiniteEdge { index: usize },
    #[error("negative or non-finite frequency {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("all frequencies are zero")]
    AllZero,
    #[error("percentages sum to {sum}, expected 100 (partial table?)")]
    PercentSum { sum: f64 },
    #[error("relative frequencies sum to {sum}, expected 1")]
    ProportionSum { sum: f64 },
    #[error("value {value} at index {index} lies outside [{lo}, {hi}]")]
    ValueOutOfRange {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid cumulative curve: {0}")]
    InvalidCurve(String),
    #[error("node ({tau}, {prob}) breaks monotonicity of the curve")]
    NonMonotoneNode { tau: f64, prob: f64 },
    #[error("upper limit {limit} must exceed {bound}")]
    UpperLimit { limit: f64, bound: f64 },
    #[error("probability level {0} outside [0, 1]")]
    InvalidLevel(f64),
    #[error("support endpoints must be finite")]
    NonFiniteSupport,
    #[error("quantile search for q = {q} did not converge")]
    NonConvergence { q: f64 },
    #[error("negative variance {0}")]
    NegativeVariance(f64),
    #[error("{0}")]
    OpenEnded(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quantile levels differ between truth and estimate")]
    LevelMismatch,
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery rather than the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::NegativeVariance(_))
    }

    /// Process exit code: 3 for numerical failures, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            3
        } else {
            2
        }
    }
}
