//! Order-by-order solution of `H W = W Ê` with operator-valued couplings.
//!
//! `W = Σ_m |m₀⟩ ⊗ c_m` collects the eigenvector coefficients and `Ê` acts on
//! the field from the right of every coefficient. With `Δ_nm = E_n − E_m`
//! and `Q` running over the interior multi-indices `0 < Q < J`:
//!
//! ```text
//! c_n^J = −½ Σ_Q Σ_m (c_m^Q)† c_m^{J−Q}
//! Ê_J   = Σ_i Σ_q V^i_{nq} c_q^{J−e_i} − Σ_Q c_n^Q Ê_{J−Q}
//! c_m^J = [Σ_i Σ_q V^i_{mq} c_q^{J−e_i} − Σ_Q c_m^Q Ê_{J−Q}] / Δ_nm
//! ```
//!
//! The first line keeps `W†W = 1` with `c_n` Hermitian, which makes every
//! `Ê_J` Hermitian. Diagonal interaction entries are allowed. Levels
//! degenerate with the target are accepted as long as their drive vanishes
//! identically below the top order; top-order amplitudes on such levels
//! are marked undetermined.

use num_complex::Complex64 as C64;

use super::{ExpansionSeries, MultiIndex, TiptError};
use crate::emitter::{CoupledSystem, DEGENERACY_TOL};
use crate::ops::{ModePolynomial, OperatorMatrix, PolySum};

#[derive(Clone, Copy, Debug, Default)]
pub struct RecursionOptions {
    /// Largest admissible polynomial degree; defaults to twice the order.
    pub degree_ceiling: Option<u32>,
}

pub fn expand_recursive(
    sys: &CoupledSystem,
    n: usize,
    max_order: u32,
) -> Result<ExpansionSeries, TiptError> {
    expand_levels(
        &sys.energies,
        &sys.interactions,
        n,
        max_order,
        RecursionOptions::default(),
    )
}

/// Recursion on bare energies and interaction matrices.
pub fn expand_levels(
    energies: &[f64],
    interactions: &[OperatorMatrix],
    n: usize,
    max_order: u32,
    opts: RecursionOptions,
) -> Result<ExpansionSeries, TiptError> {
    let n_levels = energies.len();
    if n >= n_levels {
        return Err(TiptError::LevelOutOfRange { level: n, n_levels });
    }
    if max_order < 1 {
        return Err(TiptError::BadOrder(max_order));
    }
    let n_modes = interactions.len();
    let fmodes = interactions.first().map(|v| v.n_modes()).unwrap_or(0);
    if interactions
        .iter()
        .any(|v| v.dim() != n_levels || v.n_modes() != fmodes)
    {
        return Err(TiptError::Shape);
    }
    let spread = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = DEGENERACY_TOL * spread.abs().max(f64::MIN_POSITIVE);
    // `None` marks levels degenerate with the target; they are admissible
    // only while nothing drives them.
    let inv_gap: Vec<Option<f64>> = (0..n_levels)
        .map(|m| {
            let d = energies[n] - energies[m];
            (m != n && d.abs() > tol).then(|| 1.0 / d)
        })
        .collect();
    let ceiling = opts.degree_ceiling.unwrap_or(2 * max_order);
    let zero = ModePolynomial::zero(fmodes);
    let one = C64::new(1.0, 0.0);

    let mut s = ExpansionSeries::new(n, n_levels, n_modes, max_order, energies[n]);
    let j0 = MultiIndex::zeros(n_modes);
    let c0 = (0..n_levels)
        .map(|m| {
            if m == n {
                ModePolynomial::one(fmodes)
            } else {
                zero.clone()
            }
        })
        .collect();
    s.insert(
        j0,
        ModePolynomial::constant(fmodes, C64::new(energies[n], 0.0)),
        c0,
    );

    for j in MultiIndex::enumerate(n_modes, max_order)
        .into_iter()
        .skip(1)
    {
        let interior: Vec<(usize, usize)> = j
            .interior()
            .iter()
            .map(|q| {
                (
                    s.slot(q).expect("lower order"),
                    s.slot(&j.minus(q)).expect("lower order"),
                )
            })
            .collect();
        let lower: Vec<(usize, usize)> = (0..n_modes)
            .filter_map(|i| {
                j.minus_unit(i)
                    .map(|jm| (i, s.slot(&jm).expect("lower order")))
            })
            .collect();

        // Σ_i Σ_q V^i_{mq} c_q^{J−e_i}
        let drive = |m: usize, sum: &mut PolySum| {
            for &(i, slot) in &lower {
                let v = &interactions[i];
                for q in 0..n_levels {
                    let vq = v.get(m, q);
                    let cq = s.c_at(slot, q);
                    if !vq.is_zero() && !cq.is_zero() {
                        sum.push_product(vq, cq, one);
                    }
                }
            }
        };

        let mut cn = PolySum::new(fmodes);
        for &(qs, rs) in &interior {
            for m in 0..n_levels {
                let (a, b) = (s.c_at(qs, m), s.c_at(rs, m));
                if !a.is_zero() && !b.is_zero() {
                    cn.push_product(&a.dagger(), b, C64::new(-0.5, 0.0));
                }
            }
        }
        let cn = cn.finish();

        let mut e = PolySum::new(fmodes);
        drive(n, &mut e);
        for &(qs, rs) in &interior {
            let (a, b) = (s.c_at(qs, n), s.e_at(rs));
            if !a.is_zero() && !b.is_zero() {
                e.push_product(a, b, -one);
            }
        }
        let e = e.finish();

        let mut coeffs = Vec::with_capacity(n_levels);
        let mut undetermined = Vec::new();
        for m in 0..n_levels {
            if m == n {
                coeffs.push(cn.clone());
                continue;
            }
            let mut c = PolySum::new(fmodes);
            drive(m, &mut c);
            for &(qs, rs) in &interior {
                let (a, b) = (s.c_at(qs, m), s.e_at(rs));
                if !a.is_zero() && !b.is_zero() {
                    c.push_product(a, b, -one);
                }
            }
            let c = c.finish();
            match inv_gap[m] {
                Some(g) => coeffs.push(c.scale_re(g)),
                None if c.is_zero() => coeffs.push(c),
                // top-order amplitudes never feed back into the eigenvalues
                None if j.total() == max_order => {
                    undetermined.push(m);
                    coeffs.push(ModePolynomial::zero(fmodes));
                }
                None => {
                    return Err(TiptError::DegenerateGap {
                        level: m,
                        gap: energies[n] - energies[m],
                    })
                }
            }
        }

        let worst = coeffs
            .iter()
            .chain(std::iter::once(&e))
            .map(ModePolynomial::degree)
            .max()
            .unwrap_or(0);
        if worst > ceiling {
            return Err(TiptError::DegreeCeiling {
                index: j.to_string(),
                degree: worst,
                ceiling,
            });
        }
        for m in undetermined {
            s.mark_undetermined(j.clone(), m, energies[n] - energies[m]);
        }
        s.insert(j, e, coeffs);
    }
    Ok(s)
}
