//! Exact-diagonalization oracles, truncation-error curves, unit
//! conversions and run configuration.

pub mod config;
mod ddouble;
mod joint;
mod nscaling;
pub mod units;

pub use ddouble::{refine_tridiagonal, DoubleDouble};
pub use joint::{
    classical_emitter_matrix, classical_series, cutoff_stability, effective_operator,
    exact_ground_manifold, expansion_coefficients, fitted_coefficients,
    fitted_coefficients_adaptive, fock_expectation, quadrature_nodes, tipt_ground_manifold,
    JointModel, ManifoldEnergy, Probe, CUTOFF_BUFFER, OVERLAP_THRESHOLD,
};
pub use nscaling::{
    curves_csv, ladder_energies, ladder_predictions, log_grid, nscaling_curves, ErrorCurve,
    ErrorPoint, NscalingOptions, MAX_NSCALING_N,
};

use std::error::Error;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::effective::EffectiveError;
use crate::emitter::{
    coupled_system, four_level, CoupledSystem, EmitterError, FourLevelParams, Regime,
};
use crate::ensemble::EnsembleError;
use crate::ops::{FockTruncation, OpsError};
use crate::tipt::{expand_recursive, MultiIndex, TiptError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("Fock cutoff {cutoff} is below the required {needed}")]
    Cutoff { cutoff: usize, needed: usize },
    #[error("ground manifold not identifiable: best overlap {overlap:.3} below 0.5")]
    NonPerturbative { overlap: f64 },
    #[error("model has no states")]
    EmptyModel,
    #[error("ensemble size {n} outside 1..={max}")]
    EnsembleSize { n: usize, max: usize },
    #[error("at least one probe occupation is required")]
    NoProbes,
    #[error("consistency check failed: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Tipt(#[from] TiptError),
    #[error(transparent)]
    Emitter(#[from] EmitterError),
    #[error(transparent)]
    Effective(#[from] EffectiveError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Units(#[from] units::UnitsError),
}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PHYSICS: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

fn ops_code(e: &OpsError) -> i32 {
    match e {
        OpsError::BadCutoff { .. } => EXIT_CONFIG,
        _ => EXIT_INTERNAL,
    }
}

fn tipt_code(e: &TiptError) -> i32 {
    match e {
        TiptError::DegenerateGap { .. } => EXIT_PHYSICS,
        TiptError::ClosedFormOrder(_)
        | TiptError::NonzeroDiagonal { .. }
        | TiptError::LevelOutOfRange { .. }
        | TiptError::BadOrder(_) => EXIT_CONFIG,
        _ => EXIT_INTERNAL,
    }
}

fn emitter_code(e: &EmitterError) -> i32 {
    match e {
        EmitterError::DegenerateGap { .. } => EXIT_PHYSICS,
        EmitterError::NotHermitian => EXIT_INTERNAL,
        EmitterError::Ops(o) => ops_code(o),
        _ => EXIT_CONFIG,
    }
}

fn effective_code(e: &EffectiveError) -> i32 {
    match e {
        EffectiveError::Tipt(t) => tipt_code(t),
        EffectiveError::Emitter(m) => emitter_code(m),
        EffectiveError::ModeOutOfRange { .. } | EffectiveError::LevelCount { .. } => EXIT_CONFIG,
        _ => EXIT_PHYSICS,
    }
}

fn ensemble_code(e: &EnsembleError) -> i32 {
    match e {
        EnsembleError::Tipt(t) => tipt_code(t),
        EnsembleError::Emitter(m) => emitter_code(m),
        EnsembleError::OrderTooHigh { .. } | EnsembleError::Truncation { .. } => EXIT_PHYSICS,
        _ => EXIT_CONFIG,
    }
}

impl ValidationError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::NonPerturbative { .. } | Self::Cutoff { .. } => EXIT_PHYSICS,
            Self::EnsembleSize { .. } | Self::NoProbes | Self::Units(_) => EXIT_CONFIG,
            Self::EmptyModel | Self::Mismatch(_) => EXIT_INTERNAL,
            Self::Ops(e) => ops_code(e),
            Self::Tipt(e) => tipt_code(e),
            Self::Emitter(e) => emitter_code(e),
            Self::Effective(e) => effective_code(e),
            Self::Ensemble(e) => ensemble_code(e),
        }
    }
}

/// Process exit status for an error: 2 configuration, 3 physics domain
/// (degeneracy, non-perturbative regime), 4 internal consistency.
pub fn exit_code(err: &(dyn Error + 'static)) -> i32 {
    let mut cur = Some(err);
    while let Some(e) = cur {
        if e.downcast_ref::<config::ConfigError>().is_some() {
            return EXIT_CONFIG;
        }
        if let Some(v) = e.downcast_ref::<ValidationError>() {
            return v.exit_code();
        }
        if let Some(v) = e.downcast_ref::<TiptError>() {
            return tipt_code(v);
        }
        if let Some(v) = e.downcast_ref::<EmitterError>() {
            return emitter_code(v);
        }
        if let Some(v) = e.downcast_ref::<EffectiveError>() {
            return effective_code(v);
        }
        if let Some(v) = e.downcast_ref::<EnsembleError>() {
            return ensemble_code(v);
        }
        if let Some(v) = e.downcast_ref::<OpsError>() {
            return ops_code(v);
        }
        if e.downcast_ref::<units::UnitsError>().is_some() {
            return EXIT_CONFIG;
        }
        cur = e.source();
    }
    EXIT_INTERNAL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub probe: Probe,
    pub exact: f64,
    pub predicted: f64,
    /// `|exact − predicted| / |exact|`, absolute when the exact value is zero.
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub cutoff: usize,
    pub order: u32,
    pub entries: Vec<OracleEntry>,
    /// Largest relative change of the exact energies under cutoff doubling.
    pub cutoff_stability: f64,
}

/// Exact ground-manifold energies against the truncated expansion.
pub fn oracle_report(
    sys: &CoupledSystem,
    cutoff: usize,
    n_probe: usize,
    order: u32,
) -> Result<OracleReport, ValidationError> {
    let model = JointModel::new(sys, FockTruncation::uniform(sys.n_modes(), cutoff)?)?;
    let exact = exact_ground_manifold(&model, n_probe)?;
    let predicted = tipt_ground_manifold(&model, n_probe, order)?;
    let entries = exact
        .into_iter()
        .zip(predicted)
        .map(|(x, (probe, p))| {
            let diff = (x.energy - p).abs();
            let rel_error = if x.energy == 0.0 {
                diff
            } else {
                diff / x.energy.abs()
            };
            OracleEntry {
                probe,
                exact: x.energy,
                predicted: p,
                rel_error,
            }
        })
        .collect();
    Ok(OracleReport {
        cutoff,
        order,
        entries,
        cutoff_stability: cutoff_stability(&model, n_probe)?,
    })
}

/// Coefficient of `a†a b†b` per `λ²ν²` in the fourth-order ground energy
/// of one four-level emitter with detuning `delta` and drive `omega`.
///
/// The expansion runs in units of `omega`, so only `delta/omega` enters the
/// level structure.
pub fn four_level_kerr_rate(delta: f64, omega: f64) -> Result<f64, ValidationError> {
    if !(delta.is_finite() && omega.is_finite() && delta != 0.0 && omega != 0.0) {
        return Err(units::UnitsError::NotPositive("detuning and drive").into());
    }
    let p = FourLevelParams {
        delta: delta / omega,
        omega: 1.0,
        lambda: 1.0,
        nu: 1.0,
        gamma1: 0.0,
        gamma3: 0.0,
    };
    let (scheme, drives) = four_level(p);
    let sys = coupled_system(&scheme, &drives, Regime::Rwa)?;
    let e = expand_recursive(&sys, 0, 4)?;
    let c = e
        .eigenvalue(&MultiIndex::new(vec![2, 2]))?
        .coeff_of(&[(1, 1), (1, 1)]);
    Ok(c.re / omega.powi(3))
}
