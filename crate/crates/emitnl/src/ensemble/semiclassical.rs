use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::EnsembleError;
use crate::emitter::CoupledSystem;
use crate::ops::ModePolynomial;

/// Truncated coherent state `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`, `n ≤ cutoff`.
pub fn coherent_state(alpha: C64, cutoff: usize) -> DVector<C64> {
    let mut v = DVector::<C64>::zeros(cutoff + 1);
    v[0] = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 1..=cutoff {
        v[n] = v[n - 1] * alpha / (n as f64).sqrt();
    }
    v
}

/// Smallest cutoff treated as faithful for amplitude `α`.
fn required_cutoff(alpha: C64) -> usize {
    let a2 = alpha.norm_sqr();
    (a2 + 6.0 * (a2 + 1.0).sqrt()).ceil() as usize
}

fn check_cutoff(alpha: C64, cutoff: usize) -> Result<(), EnsembleError> {
    let needed = required_cutoff(alpha);
    if cutoff < needed {
        return Err(EnsembleError::Truncation { cutoff, needed });
    }
    Ok(())
}

/// Applies a single-mode polynomial to `v`, growing the vector as needed.
fn apply(p: &ModePolynomial, v: &DVector<C64>) -> DVector<C64> {
    let grow = p.terms().map(|(m, _)| m.powers()[0].0).max().unwrap_or(0) as usize;
    let mut out = DVector::<C64>::zeros(v.len() + grow);
    for (m, c) in p.terms() {
        let (k, j) = m.powers()[0];
        let (k, j) = (k as usize, j as usize);
        for n in j..v.len() {
            let lowered = n - j;
            let down: f64 = (lowered + 1..=n).map(|x| x as f64).product();
            let up: f64 = (lowered + 1..=lowered + k).map(|x| x as f64).product();
            out[lowered + k] += c * v[n] * (down * up).sqrt();
        }
    }
    out
}

fn classical_value(p: &ModePolynomial, alpha: C64) -> C64 {
    p.terms()
        .map(|(m, c)| {
            let (k, j) = m.powers()[0];
            c * alpha.conj().powu(k) * alpha.powu(j)
        })
        .sum()
}

/// `‖(a† − α*)|α⟩‖`, evaluated without truncating the raised state.
pub fn displacement_norm(alpha: C64, cutoff: usize) -> Result<f64, EnsembleError> {
    check_cutoff(alpha, cutoff)?;
    let psi = coherent_state(alpha, cutoff);
    let raised = apply(&ModePolynomial::create(1, 0), &psi);
    let shifted = DVector::from_fn(raised.len(), |i, _| {
        raised[i]
            - if i < psi.len() {
                alpha.conj() * psi[i]
            } else {
                C64::new(0.0, 0.0)
            }
    });
    Ok(shifted.norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiclassicalResidual {
    /// `‖H|e,α⟩ − H_α|e,α⟩‖ / ‖H|e,α⟩‖`, where `H_α` replaces the mode
    /// operators by `α`, `α*`.
    pub relative: f64,
    pub displacement_norm: f64,
}

/// How far the interaction acting on `|level⟩|α⟩` is from its
/// classical-field replacement.
pub fn semiclassical_residual(
    sys: &CoupledSystem,
    level: usize,
    alpha: C64,
    cutoff: usize,
) -> Result<SemiclassicalResidual, EnsembleError> {
    if sys.n_modes() != 1 || sys.interactions[0].n_modes() != 1 {
        return Err(EnsembleError::SingleModeOnly("the semiclassical residual"));
    }
    let n = sys.n_levels();
    if level >= n {
        return Err(EnsembleError::LevelOutOfRange { level, n_levels: n });
    }
    check_cutoff(alpha, cutoff)?;
    let psi = coherent_state(alpha, cutoff);
    let rate = sys.modes[0].rate;
    let v = &sys.interactions[0];
    let (mut full, mut diff) = (0.0, 0.0);
    for row in 0..n {
        let p = v.get(row, level);
        let quantum = apply(p, &psi) * C64::new(rate, 0.0);
        let classical = classical_value(p, alpha) * rate;
        let d = DVector::from_fn(quantum.len(), |i, _| {
            quantum[i]
                - if i < psi.len() {
                    classical * psi[i]
                } else {
                    C64::new(0.0, 0.0)
                }
        });
        full += quantum.norm_squared();
        diff += d.norm_squared();
    }
    let relative = if full == 0.0 {
        0.0
    } else {
        (diff / full).sqrt()
    };
    Ok(SemiclassicalResidual {
        relative,
        displacement_norm: displacement_norm(alpha, cutoff)?,
    })
}
