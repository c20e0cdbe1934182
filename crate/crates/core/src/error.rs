use std::path::PathBuf;

use crate::corpus::Label;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate document id {id:?} on line {line}")]
    DuplicateId { id: String, line: usize },
    #[error("class {class} has {count} labeled documents, need at least {k} for {k}-fold split")]
    TooFewInstances { class: Label, count: usize, k: usize },
    #[error("fold count must be at least 2, got {0}")]
    InvalidFoldCount(usize),
    #[error("polarity of {term:?} is {value}, outside [-1, 1]")]
    PolarityOutOfRange { term: String, value: f64 },
    #[error("training data is empty or lacks a required class")]
    EmptyTrainingData,
    #[error("k-means needs at least {k} points, got {points}")]
    TooFewPoints { k: usize, points: usize },
    #[error("training data contains fewer than two classes")]
    SingleClassData,
    #[error("no feature has information gain above {threshold}")]
    NoFeaturesSurvive { threshold: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vector has column {column} but model expects {expected} columns")]
    DimensionMismatch { column: usize, expected: usize },
    #[error("posterior distribution is invalid: {0}")]
    InvalidDistribution(String),
    #[error("prediction and gold lists differ in length ({pred} vs {gold})")]
    LengthMismatch { pred: usize, gold: usize },
    #[error("nothing to evaluate")]
    EmptyInput,
    #[error("document {0:?} has no gold label")]
    Unlabeled(String),
    #[error("model file: {0}")]
    Model(String),
    #[error("model was trained with a different {0}")]
    ConfigMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
