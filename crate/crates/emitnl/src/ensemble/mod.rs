//! Ensembles of identical, independent emitters in the symmetric subspace.

mod bounds;
mod collective;
mod semiclassical;

pub use bounds::{coupling_bounds, kerr_scaling_report, KerrScaling, KerrScheme};
pub use collective::{
    collective_matrix, ensemble_expansion, scaling_identity_check, symmetric_matrix,
    symmetric_operator, tls_ladder, CollectiveSystem, ScalingCheck, SymmetricState,
    MAX_ENSEMBLE_ORDER,
};
pub use semiclassical::{
    coherent_state, displacement_norm, semiclassical_residual, SemiclassicalResidual,
};

use thiserror::Error;

use crate::emitter::EmitterError;
use crate::tipt::TiptError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("ensemble size must be at least 1 (got {0})")]
    EmptyEnsemble(usize),
    #[error("collective rules need zero interaction diagonals (mode {mode})")]
    NonzeroDiagonal { mode: usize },
    #[error(
        "the double-excitation basis is complete only through order {max} (requested {requested})"
    )]
    OrderTooHigh { requested: u32, max: u32 },
    #[error("{0} needs a single-mode system")]
    SingleModeOnly(&'static str),
    #[error("Fock cutoff {cutoff} below the required {needed}")]
    Truncation { cutoff: usize, needed: usize },
    #[error("emitter level {level} out of range for {n_levels} levels")]
    LevelOutOfRange { level: usize, n_levels: usize },
    #[error(transparent)]
    Tipt(#[from] TiptError),
    #[error(transparent)]
    Emitter(#[from] EmitterError),
}
