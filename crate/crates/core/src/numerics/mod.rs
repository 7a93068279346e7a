//! Dense linear algebra and 1-D calculus shared by the other modules.

mod calculus;
mod eigen;
mod matrix;

use thiserror::Error;

pub use calculus::{differentiate, integrate, integrate_samples, linspace};
pub use eigen::{
    cholesky, gen_sym_eig, gen_sym_eig_gram, pair_residual, regularization_shift, sym_eig, GenEigResult,
    JACOBI_SWEEPS, SYMMETRY_TOL,
};
pub use matrix::{dot, norm2, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is not positive definite (pivot {pivot} = {value:e}); regularize before solving")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("panel count must be even and at least 2, got {0}")]
    InvalidPanels(usize),
    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("step must be positive, got {0}")]
    InvalidStep(f64),
}
