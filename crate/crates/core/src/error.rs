use thiserror::Error;

/// Errors raised by the model, search and construction routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlottoError {
    #[error("outcome requested for an empty item")]
    EmptyItem,
    #[error("class index {index} out of range ({classes} classes)")]
    InvalidClass { index: usize, classes: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
    #[error("search space of {size} arrangements exceeds budget {budget}")]
    SearchTooLarge { size: u128, budget: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("constructed arrangement is not stable: {0}")]
    ConstructionUnstable(String),
    #[error("operation requires the mean outcome function")]
    OutcomeMismatch,
    #[error("item {0} carries no agent mass")]
    DegenerateItem(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

impl BlottoError {
    /// Stable machine-readable name, used by the CLI on its diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            BlottoError::EmptyItem => "EmptyItem",
            BlottoError::InvalidClass { .. } => "InvalidClass",
            BlottoError::InvalidInstance(_) => "InvalidInstance",
            BlottoError::InvalidArrangement(_) => "InvalidArrangement",
            BlottoError::SearchTooLarge { .. } => "SearchTooLarge",
            BlottoError::PreconditionViolated(_) => "PreconditionViolated",
            BlottoError::ConstructionUnstable(_) => "ConstructionUnstable",
            BlottoError::OutcomeMismatch => "OutcomeMismatch",
            BlottoError::DegenerateItem(_) => "DegenerateItem",
            BlottoError::Parse(_) => "Parse",
        }
    }
}

pub type Result<T, E = BlottoError> = std::result::Result<T, E>;
