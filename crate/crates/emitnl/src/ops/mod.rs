//! Bosonic operator algebra and its realization on truncated Fock spaces.

mod dense;
mod fock;
mod matrix;
mod poly;

pub(crate) use dense::eigh;
pub use dense::{eigendecompose, fix_phase, DenseOperator, Eigen, HERMITIAN_TOL};
pub use fock::{realize, FockTruncation};
pub use matrix::OperatorMatrix;
pub(crate) use poly::{default_mode_name, fmt_monomial};
pub use poly::{ModePolynomial, Monomial, PolyDisplay, PolySum, DEFAULT_PRUNE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpsError {
    #[error("mode count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },
    #[error("Fock cutoff for mode {mode} must be at least 1")]
    BadCutoff { mode: usize },
    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
}
