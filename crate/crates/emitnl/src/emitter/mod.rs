//! Level schemes, classical drives and the dressed emitter basis.

mod consistency;
mod dress;
mod scheme;
mod system;

pub use consistency::{check_consistency, LOOP_TOL};
pub use dress::{build_driven_emitter, dress, DressedBasis, DEGENERACY_TOL};
pub use scheme::{
    four_level, two_level, DriveKind, DriveSpec, FourLevelParams, Level, LevelScheme, Regime,
    Transition,
};
pub use system::{
    coupled_system, transform_interactions, undressed_interactions, CoupledSystem, ModeInfo,
};

use thiserror::Error;

use crate::ops::OpsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmitterError {
    #[error("invalid level scheme: {0}")]
    InvalidScheme(String),
    #[error("drive {drive} refers to missing transition {transition}")]
    UnknownTransition { drive: usize, transition: usize },
    #[error("drive {drive} does not belong to the requested regime")]
    RegimeMismatch { drive: usize },
    #[error("mode frequencies inconsistent around levels {cycle:?} (mismatch {mismatch:.3e})")]
    Inconsistent { cycle: Vec<usize>, mismatch: f64 },
    #[error("dressed level {level} is degenerate with the ground state (gap {gap:.3e})")]
    DegenerateGap { level: usize, gap: f64 },
    #[error("emitter Hamiltonian is not Hermitian")]
    NotHermitian,
    #[error(transparent)]
    Ops(#[from] OpsError),
}
