use thiserror::Error;

/// Errors from state construction and operator application.
#[derive(Debug, Clone, Error)]
pub enum FockError {
    #[error("truncation dimension must satisfy n_max >= 1, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("parameter {name} = {value} outside valid range {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error(
        "truncated tail mass {tail:.3e} exceeds tolerance {tol:.3e}; increase n_max"
    )]
    TruncationTail { tail: f64, tol: f64 },

    #[error("operator annihilates the state (trace {trace:.3e} < 1e-14); post-selection impossible")]
    ZeroTrace { trace: f64 },

    #[error("no herald click possible (click probability {0:.3e} < 1e-14)")]
    NoClick(f64),

    #[error("operator is not diagonal-preserving (column {column} has {nonzeros} nonzero entries); use the density-matrix variant")]
    NotDiagonalPreserving { column: usize, nonzeros: usize },

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("polynomial term power {power} exceeds n_max {n_max}")]
    PowerExceedsDimension { power: usize, n_max: usize },
}
