use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{
    default_tolerance, free_field, frequency_components, provenance, resonance_filter,
    EffectiveError, ProvenanceEntry,
};
use crate::emitter::{CoupledSystem, LevelScheme};
use crate::ops::{ModePolynomial, PolySum};
use crate::tipt::{expand_recursive, ExpansionSeries, MultiIndex, TiptError};

/// Effective operator replacing `|0⟩⟨n|` for a level decaying to the ground.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionOperator {
    pub level: usize,
    pub decay_rate: f64,
    pub operator: ModePolynomial,
}

/// One Lindblad channel `γ D[L]`, with `L` normalized so that its largest
/// coefficient is exactly 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dissipator {
    pub level: usize,
    /// Oscillation frequency shared by every monomial of `operator`.
    pub frequency: f64,
    pub operator: ModePolynomial,
    pub rate: f64,
}

/// `dρ/dt = −i[H, ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k† L_k, ρ})`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    pub mode_names: Vec<String>,
    pub frequencies: Vec<f64>,
    pub hamiltonian: ModePolynomial,
    pub dissipators: Vec<Dissipator>,
    pub provenance: Vec<ProvenanceEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelOptions {
    pub max_order: u32,
    /// Adds `Σ ω a†a` to the Hamiltonian.
    pub free_field: bool,
    /// Total order at which transition operators are truncated.
    pub decay_order: u32,
    /// Resonance tolerance; [`default_tolerance`] when absent.
    pub tolerance: Option<f64>,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            max_order: 4,
            free_field: false,
            decay_order: 2,
            tolerance: None,
        }
    }
}

/// Projection of the bare state `|k⟩` onto the ground manifold, split by
/// perturbative order: `A_k^{(p)} = Σ_{|J|=p} rates^J Σ_m U_{km} c_m^J`.
fn bare_amplitudes(
    sys: &CoupledSystem,
    series: &ExpansionSeries,
    k: usize,
    max_order: u32,
) -> Result<Vec<ModePolynomial>, TiptError> {
    let rates = sys.rates();
    let fmodes = sys.interactions.first().map(|v| v.n_modes()).unwrap_or(0);
    (0..=max_order)
        .map(|p| {
            let mut sum = PolySum::new(fmodes);
            for j in series.indices().iter().filter(|j| j.total() == p) {
                let w = j.weight(&rates);
                for m in 0..sys.n_levels() {
                    let c = series.eigenvector_coefficient(m, j)?;
                    sum.push_poly(c, sys.u[(k, m)] * w);
                }
            }
            Ok(sum.finish())
        })
        .collect()
}

/// `Σ_n = A_0† A_n` truncated at total order `max_order`, where
/// `A_k = ⟨k|0̃⟩` is the bare-`k` component of the ground manifold.
pub fn transition_operator(
    sys: &CoupledSystem,
    series: &ExpansionSeries,
    level: usize,
    max_order: u32,
) -> Result<ModePolynomial, EffectiveError> {
    if level >= sys.n_levels() {
        return Err(TiptError::LevelOutOfRange {
            level,
            n_levels: sys.n_levels(),
        }
        .into());
    }
    if series.max_order < max_order {
        let j = MultiIndex::with_total(sys.n_modes(), max_order)
            .into_iter()
            .next();
        return Err(TiptError::NotComputed {
            index: j.map(|j| j.to_string()).unwrap_or_default(),
        }
        .into());
    }
    let a0 = bare_amplitudes(sys, series, 0, max_order)?;
    let an = bare_amplitudes(sys, series, level, max_order)?;
    let fmodes = a0[0].n_modes();
    let mut sum = PolySum::new(fmodes);
    for (p, x) in a0.iter().enumerate() {
        let xd = x.dagger();
        for y in &an[..=(max_order as usize - p)] {
            sum.push_product(&xd, y, C64::new(1.0, 0.0));
        }
    }
    Ok(sum.finish())
}

/// Effective transition operators of every decaying level.
pub fn effective_transition_operators(
    sys: &CoupledSystem,
    scheme: &LevelScheme,
    series: &ExpansionSeries,
    max_order: u32,
) -> Result<Vec<TransitionOperator>, EffectiveError> {
    if scheme.len() != sys.n_levels() {
        return Err(EffectiveError::LevelCount {
            scheme: scheme.len(),
            system: sys.n_levels(),
        });
    }
    let mut out = Vec::new();
    for (n, lvl) in scheme.levels.iter().enumerate().skip(1) {
        if lvl.decay_rate == 0.0 {
            continue;
        }
        if !lvl.decays_to_ground {
            return Err(EffectiveError::UnsupportedDecay { level: n });
        }
        out.push(TransitionOperator {
            level: n,
            decay_rate: lvl.decay_rate,
            operator: transition_operator(sys, series, n, max_order)?,
        });
    }
    Ok(out)
}

/// Combines the Hamiltonian and the decay channels, keeping only resonant
/// Hamiltonian terms and splitting every transition operator into parts of
/// distinct frequency, which do not interfere after time averaging.
pub fn assemble_master_equation(
    hamiltonian: &ModePolynomial,
    sigmas: &[TransitionOperator],
    omega: &[f64],
    mode_names: Vec<String>,
    tol: f64,
) -> EffectiveModel {
    let mut dissipators = Vec::new();
    for s in sigmas.iter().filter(|s| s.decay_rate > 0.0) {
        for (frequency, part) in frequency_components(&s.operator, omega, tol) {
            let Some((_, &lead)) = part
                .terms()
                .fold(None, |best: Option<(f64, &C64)>, (_, c)| match best {
                    Some((b, _)) if b >= c.norm() => best,
                    _ => Some((c.norm(), c)),
                })
            else {
                continue;
            };
            dissipators.push(Dissipator {
                level: s.level,
                frequency,
                operator: ModePolynomial::from_terms(
                    part.n_modes(),
                    part.terms().map(|(m, c)| (m.clone(), c / lead)),
                )
                .expect("same mode count"),
                rate: s.decay_rate * lead.norm_sqr(),
            });
        }
    }
    EffectiveModel {
        mode_names,
        frequencies: omega.to_vec(),
        hamiltonian: resonance_filter(hamiltonian, omega, tol),
        dissipators,
        provenance: Vec::new(),
    }
}

/// Full pipeline: ground expansion, Hamiltonian, provenance and, when a
/// level scheme is supplied, decay channels.
pub fn effective_model(
    sys: &CoupledSystem,
    scheme: Option<&LevelScheme>,
    opts: ModelOptions,
) -> Result<EffectiveModel, EffectiveError> {
    let series = expand_recursive(sys, 0, opts.max_order.max(opts.decay_order))?;
    let omega = sys.frequencies();
    let tol = opts.tolerance.unwrap_or_else(|| default_tolerance(&omega));
    let mut h = series.resum_eigenvalue(&sys.rates(), opts.max_order);
    if opts.free_field {
        h = h + free_field(&omega);
    }
    let sigmas = match scheme {
        Some(s) => effective_transition_operators(sys, s, &series, opts.decay_order)?,
        None => Vec::new(),
    };
    let mut model = assemble_master_equation(&h, &sigmas, &omega, sys.mode_names(), tol);
    model.provenance = provenance(&series, &model.hamiltonian);
    Ok(model)
}
