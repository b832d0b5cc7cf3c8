use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Invalid(String),

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("exact analysis refused: {0}")]
    CostGuard(String),

    #[error("predicted work of {predicted} generation steps exceeds the budget of {budget}")]
    BudgetExceeded { predicted: u128, budget: u128 },

    #[error("chain is not ergodic: {0}")]
    NotErgodic(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Errors caused by bad user input, as opposed to failures while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_)
                | Error::DimensionMismatch { .. }
                | Error::CostGuard(_)
                | Error::BudgetExceeded { .. }
        )
    }
}
