use thiserror::Error;

/// Errors raised by the matrix substrate.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix of dimension {dim} violates {invariant} (residual {residual:.3e}, tolerance {tol:.3e})")]
    InvariantViolation {
        dim: usize,
        invariant: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("spectrum contains -1: eigenangle {angle} is within {tol} of the branch cut")]
    SpectrumContainsMinusOne { angle: f64, tol: f64 },

    #[error("argument out of domain: {0}")]
    DomainViolation(String),

    #[error("matrix JSON rejected: {0}")]
    MalformedMatrix(String),
}
