//! Explicit ground-state eigenvalue coefficients through fourth order.
//!
//! With `Δ_k = E_0 − E_k`, `S` the symbol multiset of the index and sums over
//! excited levels only:
//!
//! ```text
//! order 2:  Σ_l ALLP[V_0l V_l0] / Δ_l
//! order 3:  Σ_kl ALLP[V_0k V_kl V_l0] / (Δ_k Δ_l)
//! order 4:  Σ_kql ALLP[V_0k V_kq V_ql V_l0] / (Δ_k Δ_q Δ_l)
//!           − ½ Σ_kl ALLP[V_0k V_k0 V_0l V_l0] (1/(Δ_k² Δ_l) + 1/(Δ_k Δ_l²))
//! ```
//!
//! The last term is written symmetrically in `k` and `l`; for non-commuting
//! entries only this form is Hermitian and agrees with the recursion.

use num_complex::Complex64 as C64;

use super::allp::{chain_product, distinct_permutations};
use super::{MultiIndex, TiptError};
use crate::emitter::CoupledSystem;
use crate::ops::{ModePolynomial, OperatorMatrix, PolySum};

pub fn eigenvalue_coefficient_closed(
    index: &MultiIndex,
    sys: &CoupledSystem,
) -> Result<ModePolynomial, TiptError> {
    closed_levels(index, &sys.energies, &sys.interactions)
}

pub fn closed_levels(
    index: &MultiIndex,
    energies: &[f64],
    interactions: &[OperatorMatrix],
) -> Result<ModePolynomial, TiptError> {
    let order = index.total();
    if order > 4 {
        return Err(TiptError::ClosedFormOrder(order));
    }
    if index.len() != interactions.len() {
        return Err(TiptError::Shape);
    }
    if let Some(l) = interactions.iter().position(|v| !v.has_zero_diagonal()) {
        return Err(TiptError::NonzeroDiagonal { mode: l });
    }
    let fmodes = interactions.first().map(|v| v.n_modes()).unwrap_or(0);
    let mats: Vec<&OperatorMatrix> = interactions.iter().collect();
    let n = energies.len();
    let d: Vec<f64> = energies.iter().map(|e| energies[0] - e).collect();
    let perms = distinct_permutations(&index.symbols());
    let mut sum = PolySum::new(fmodes);
    let mut add = |chain: &[usize], w: f64| {
        for p in &perms {
            if let Some(prod) = chain_product(&mats, p, chain) {
                sum.push_poly(&prod, C64::new(w, 0.0));
            }
        }
    };
    match order {
        0 => return Ok(ModePolynomial::constant(fmodes, C64::new(energies[0], 0.0))),
        1 => {}
        2 => {
            for l in 1..n {
                add(&[0, l, 0], 1.0 / d[l]);
            }
        }
        3 => {
            for k in 1..n {
                for l in 1..n {
                    add(&[0, k, l, 0], 1.0 / (d[k] * d[l]));
                }
            }
        }
        _ => {
            for k in 1..n {
                for q in 1..n {
                    for l in 1..n {
                        add(&[0, k, q, l, 0], 1.0 / (d[k] * d[q] * d[l]));
                    }
                }
            }
            for k in 1..n {
                for l in 1..n {
                    let w = 1.0 / (d[k] * d[k] * d[l]) + 1.0 / (d[k] * d[l] * d[l]);
                    add(&[0, k, 0, l, 0], -0.5 * w);
                }
            }
        }
    }
    Ok(sum.finish())
}
