use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("party label `{0}` is already in use")]
    DuplicateParty(String),

    #[error("unknown party label `{0}`")]
    UnknownParty(String),

    #[error("invalid preset: {0}")]
    InvalidPreset(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("objective returned {value} at angles {angles:?}")]
    ObjectiveError { value: f64, angles: Vec<f64> },

    #[error("state is not pure (purity {0})")]
    NotPure(f64),

    #[error("state does not have the required shape: {0}")]
    ShapeMismatch(String),

    #[error("purifying ancilla would need dimension {0} (max 8)")]
    AncillaTooLarge(usize),

    #[error("total dimension {dim} exceeds the cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("POVM element {0} is not rank one")]
    NotRankOne(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Validation failure in a state document; `field` names the offending JSON field.
    #[error("field `{field}`: {message}")]
    InvalidField { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidField {
            field: field.into(),
            message: message.into(),
        }
    }
}
