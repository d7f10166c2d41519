use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum GlcError {
    #[error("csv error at row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("non-numeric value {value:?} at row {row}, column {column} ({attribute})")]
    NonNumeric {
        row: usize,
        column: usize,
        attribute: String,
        value: String,
    },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("dataset has no points")]
    EmptyDataset,

    #[error("dataset has no attributes")]
    NoAttributes,

    #[error("label column {0:?} not found")]
    LabelColumnNotFound(String),

    #[error("class {0:?} does not occur in the dataset")]
    UnknownClass(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("class {class:?} has {count} points, at least {required} required")]
    TooFewPoints {
        class: String,
        count: usize,
        required: usize,
    },

    #[error("dataset has a single class; two are required")]
    SingleClass,

    #[error("coefficient vector is zero")]
    ZeroCoefficients,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0} is not in the dataset")]
    PointNotFound(String),

    #[error("empty selection: no polyline endpoint inside the rectangle")]
    EmptySelection,

    #[error("HBs overlap in n-D: no separating attribute")]
    HyperblocksOverlap,

    #[error("degenerate separation: separating values of the HB1 lower bound sum to {0}")]
    DegenerateSeparation(f64),

    #[error("empty support vector set")]
    EmptySupportVectors,

    #[error("split is empty")]
    EmptySplit,

    #[error("split covers the whole dataset; no training complement")]
    EmptyComplement,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse classification of an error, used by the CLI and the service to pick
/// exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or a violated precondition on otherwise valid data.
    Validation,
    /// The input data itself could not be read or used.
    Data,
}

impl GlcError {
    pub fn kind(&self) -> ErrorKind {
        use GlcError::*;
        match self {
            Csv { .. } | NonNumeric { .. } | NonFinite { .. } | EmptyDataset | NoAttributes
            | LabelColumnNotFound(_) | Io(_) | Json(_) | TooFewPoints { .. } | SingleClass => {
                ErrorKind::Data
            }
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, GlcError>;
