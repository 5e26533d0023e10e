//! Effective field Hamiltonians, resonance filtering, effective decay
//! operators and nonlinearity classification.

mod classify;
mod filter;
mod hamiltonian;
mod leakage;
mod master;

pub use classify::{classify, Matching, NonlinearityEntry, NonlinearityKind, NonlinearityReport};
pub use filter::{default_tolerance, frequency_components, resonance_filter};
pub use hamiltonian::{assemble_hamiltonian, free_field, provenance, ProvenanceEntry};
pub(crate) use leakage::product_form;
pub use leakage::{displacement_leakage, Leakage};
pub use master::{
    assemble_master_equation, effective_model, effective_transition_operators, transition_operator,
    Dissipator, EffectiveModel, ModelOptions, TransitionOperator,
};

use thiserror::Error;

use crate::emitter::EmitterError;
use crate::tipt::TiptError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EffectiveError {
    #[error("level {level} decays to a level other than the ground state")]
    UnsupportedDecay { level: usize },
    #[error("{0} requires the bare coupling regime")]
    RequiresBare(&'static str),
    #[error("mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("interaction element ({row},{col}) is not a multiple of one field quadrature")]
    NotProductForm { row: usize, col: usize },
    #[error("scheme has {scheme} levels but the system has {system}")]
    LevelCount { scheme: usize, system: usize },
    #[error(transparent)]
    Tipt(#[from] TiptError),
    #[error(transparent)]
    Emitter(#[from] EmitterError),
}
