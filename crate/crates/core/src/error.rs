use thiserror::Error;

/// Errors raised by the solver core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("degenerate velocity grid: constraint matrix C C^T is singular")]
    SingularConstraints,
    #[error("invalid state at cell {cell:?}: rho = {density}, theta = {temperature}")]
    InvalidState {
        cell: Option<usize>,
        density: f64,
        temperature: f64,
    },
    #[error("maximum signal speed is zero")]
    ZeroWaveSpeed,
    #[error("velocity bounds too narrow for problem {problem}: need |v| up to {required}, have {available}")]
    VelocityBoundsTooNarrow {
        problem: &'static str,
        required: f64,
        available: f64,
    },
}

impl Error {
    /// Attach a cell index to an [`Error::InvalidState`] that lacks one.
    pub fn at_cell(self, index: usize) -> Self {
        match self {
            Error::InvalidState {
                cell: None,
                density,
                temperature,
            } => Error::InvalidState {
                cell: Some(index),
                density,
                temperature,
            },
            other => other,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
