//! Small dense numeric kernels: LU solve, sorted real Schur decomposition,
//! and non-negative least squares.
//!
//! Everything here is written for tiny problems (n up to a few hundred).
//! All routines are pure and allocate their own workspaces.

mod lu;
mod matrix;
mod nnls;
mod schur;

pub use lu::{solve_linear, Lu};
pub use matrix::DenseMatrix;
pub use nnls::{least_squares, nnls, NnlsOptions, NnlsSolution};
pub use schur::{eigenvalues, sorted_real_schur, SortedSchur};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular (zero pivot in column {column})")]
    Singular { column: usize },
    #[error("matrix is ill-conditioned (estimated condition {condition:.3e} > 1e12)")]
    IllConditioned { condition: f64 },
    #[error("eigenvalue {index} of the sorted spectrum is complex ({re} {im:+}i); leading 2x2 block must be real")]
    ComplexLeadingPair { index: usize, re: f64, im: f64 },
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },
    #[error("iteration cap of {cap} exceeded")]
    IterationCap { cap: usize },
}

/// Condition estimates above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;
