use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("singular pencil: {0}")]
    SingularPencil(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("cardinality mismatch: {left} points vs {right} points")]
    CardinalityMismatch { left: usize, right: usize },

    #[error("expected a set of exactly {expected} points, found {found}")]
    Cardinality { expected: usize, found: usize },

    #[error("invalid point at index {index}: {reason}")]
    InvalidPoint { index: usize, reason: String },

    #[error("{name} = {value} is outside the admissible range {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("mapped point {index} has norm {norm} >= scale {scale}")]
    Scale { index: usize, norm: f64, scale: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimMismatch { .. }
                | Error::CardinalityMismatch { .. }
                | Error::Cardinality { .. }
                | Error::InvalidPoint { .. }
                | Error::Range { .. }
                | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
