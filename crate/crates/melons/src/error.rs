//! Error type shared by all layers.
//!
//! The three variants map onto the CLI exit-code contract: domain errors
//! are usage problems (exit 2), internal-consistency failures indicate an
//! implementation bug that exact arithmetic detected (exit 3), and numeric
//! errors are quadrature/convergence failures (exit 4).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MelonError {
    /// A precondition on the inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two routes that must agree exactly did not, or an exact division
    /// left a remainder. Always a bug, never a user mistake.
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// A numeric routine failed to converge within its budget.
    /// Carries whatever partial diagnostics were available.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, MelonError>;

impl MelonError {
    /// Exit code for the CLI contract (0 success, 2 usage, 3 internal, 4 numeric).
    pub fn exit_code(&self) -> i32 {
        match self {
            MelonError::Domain(_) => 2,
            MelonError::Internal(_) => 3,
            MelonError::Numeric(_) => 4,
        }
    }
}
