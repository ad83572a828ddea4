//! Error types shared across the crate.

use thiserror::Error;

/// A single violated [`crate::model::Model`] invariant.
///
/// `validate` collects every violation instead of stopping at the first,
/// so a bad model file produces one complete diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelIssue {
    #[error("overlap at index {index}")]
    Overlap { index: usize },
    #[error("reversed start/end at index {index}")]
    ReversedMarker { index: usize },
    #[error("markers out of order at index {index}")]
    UnsortedMarker { index: usize },
    #[error("non-finite marker bounds at index {index}")]
    NonFiniteMarker { index: usize },
    #[error("nonpositive scale")]
    NonPositiveScale,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {}", format_issues(.0))]
    InvalidModel(Vec<ModelIssue>),
    #[error("series must contain at least one sample")]
    EmptySeries,
    #[error("series contains a non-finite value at index {index}")]
    NonFiniteSample { index: usize },
    #[error("marker {index} ([{start}, {end}]) outside series of length {len}")]
    MarkerOutOfRange {
        index: usize,
        start: i64,
        end: i64,
        len: usize,
    },
    #[error("marker index {index} out of range ({len} markers)")]
    MarkerIndexOutOfRange { index: usize, len: usize },
    #[error("position {position} out of range for series of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("template must contain at least one sample")]
    EmptyTemplate,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("embedded pair has mismatched lengths ({left} vs {right})")]
    PairLengthMismatch { left: usize, right: usize },
    #[error("mixed embedding configs in training pairs")]
    MixedEmbeddingConfigs,
    #[error("{rows} total rows is fewer than the embedding dimension {dim}")]
    InsufficientRows { rows: usize, dim: usize },
    #[error("ridge must be nonnegative and finite, got {0}")]
    InvalidRidge(f64),
    #[error("regularized covariance is singular (ridge too small or degenerate data)")]
    SingularCovariance,
    #[error("window {window} is infeasible for lengths {len_a} and {len_b}")]
    InfeasibleWindow {
        window: usize,
        len_a: usize,
        len_b: usize,
    },
    #[error("invalid alignment path: {0}")]
    InvalidPath(String),
    #[error("invalid aligned model: {0}")]
    InvalidAlignedModel(String),
    #[error("replication synthesis requires a template")]
    MissingTemplate,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("no embedding candidates supplied")]
    EmptyCandidates,
    #[error("{folds} folds exceed training set size {size}")]
    TooManyFolds { folds: usize, size: usize },
    #[error("cross-validation needs at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("marker counts differ: estimated {estimated}, truth {truth}")]
    MarkerCountMismatch { estimated: usize, truth: usize },
    #[error("invalid benchmark config: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_issues(issues: &[ModelIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
