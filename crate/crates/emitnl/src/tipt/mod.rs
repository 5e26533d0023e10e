//! Multi-parameter perturbation expansions with operator-valued couplings.

mod allp;
mod closed;
mod index;
mod recursion;
mod series;

pub use allp::{allp, check_chain, distinct_permutations, Factor};
pub use closed::{closed_levels, eigenvalue_coefficient_closed};
pub use index::MultiIndex;
pub use recursion::{expand_levels, expand_recursive, RecursionOptions};
pub use series::{ExpansionSeries, SeriesReport};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TiptError {
    #[error("subscript chain broken before factor {position}")]
    BrokenChain { position: usize },
    #[error("explicit coefficients stop at fourth order (requested {0}); use the recursion")]
    ClosedFormOrder(u32),
    #[error("explicit coefficients need zero interaction diagonals (mode {mode})")]
    NonzeroDiagonal { mode: usize },
    #[error("level {level} is degenerate with the target (gap {gap:.3e})")]
    DegenerateGap { level: usize, gap: f64 },
    #[error("coefficient {index} reached degree {degree} above the ceiling {ceiling}")]
    DegreeCeiling {
        index: String,
        degree: u32,
        ceiling: u32,
    },
    #[error("coefficient {index} was not computed")]
    NotComputed { index: String },
    #[error("level {level} out of range for {n_levels} levels")]
    LevelOutOfRange { level: usize, n_levels: usize },
    #[error("expansion order must be at least 1 (got {0})")]
    BadOrder(u32),
    #[error("interaction matrices disagree in shape")]
    Shape,
}
