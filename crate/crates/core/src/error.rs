use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("composite undefined: {0}")]
    CompositeUndefined(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not completely positive: minimum eigenvalue {min_eigenvalue:e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("outcome `{label}` is not in the positive cone (minimum {min_value:e})")]
    NotInCone { label: String, min_value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unphysical setup: total probability weight is zero")]
    UnphysicalSetup,

    #[error("uncovered subsystem: {0}")]
    UncoveredSubsystem(String),

    #[error("wire dimension mismatch: {a} (dim {dim_a}) <-> {b} (dim {dim_b})")]
    WireDimensionMismatch {
        a: String,
        dim_a: usize,
        b: String,
        dim_b: usize,
    },

    #[error("invalid network: {0}")]
    Network(String),

    #[error("network has {0} outcome tuples, above the limit of 1000000")]
    TooManyOutcomes(usize),

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
