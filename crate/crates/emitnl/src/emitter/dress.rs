use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{check_consistency, DriveKind, DriveSpec, EmitterError, LevelScheme, Regime};
use crate::ops::eigh;

/// Relative tolerance for gaps, in units of the level spread.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Emitter Hamiltonian with classical drives, quantized modes excluded.
pub fn build_driven_emitter(
    scheme: &LevelScheme,
    drives: &[DriveSpec],
    regime: Regime,
) -> Result<DMatrix<C64>, EmitterError> {
    scheme.validate()?;
    let n = scheme.len();
    let diag: Vec<f64> = match regime {
        Regime::Bare => scheme.levels.iter().map(|l| l.energy).collect(),
        Regime::Rwa => check_consistency(scheme, drives)?,
    };
    let mut h = DMatrix::<C64>::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        diag.into_iter().map(|e| C64::new(e, 0.0)),
    ));
    for (i, d) in drives.iter().enumerate() {
        let tr = scheme
            .transitions
            .get(d.transition)
            .ok_or(EmitterError::UnknownTransition {
                drive: i,
                transition: d.transition,
            })?;
        let (lo, up) = (tr.lower, tr.upper);
        match (&d.kind, regime) {
            (DriveKind::Quantized { .. }, _) => {}
            (DriveKind::ClassicalBare { amplitude }, Regime::Bare) => {
                h[(lo, up)] += C64::new(*amplitude, 0.0);
                h[(up, lo)] += C64::new(*amplitude, 0.0);
            }
            (DriveKind::ClassicalRwa { amplitude, .. }, Regime::Rwa) => {
                // β σ† + β* σ with σ = |lower⟩⟨upper|
                h[(up, lo)] += amplitude;
                h[(lo, up)] += amplitude.conj();
            }
            _ => return Err(EmitterError::RegimeMismatch { drive: i }),
        }
    }
    Ok(h)
}

/// Eigenbasis of the driven emitter.
#[derive(Clone, Debug)]
pub struct DressedBasis {
    /// Columns are dressed states in the bare basis.
    pub u: DMatrix<C64>,
    /// Dressed energies, indexed like the columns of `u`.
    pub energies: Vec<f64>,
    /// `Δ_k = E_0 − E_k`.
    pub gaps: Vec<f64>,
    /// Bare level each dressed state is labelled by.
    pub bare_label: Vec<usize>,
}

/// Diagonalizes the driven emitter.
///
/// The dressed ground state is the eigenvector with the largest overlap with
/// the bare ground and is placed first. The remaining states are taken in
/// ascending energy and each is labelled by the unclaimed bare level it
/// overlaps most (lowest index on ties); dressed states are then ordered by
/// that label.
pub fn dress(h: &DMatrix<C64>) -> Result<DressedBasis, EmitterError> {
    let n = h.nrows();
    let defect = (h - h.adjoint())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if defect > 1e-12 * h.norm().max(f64::MIN_POSITIVE) {
        return Err(EmitterError::NotHermitian);
    }
    let eig = eigh(h)?;
    let weight = |bare: usize, col: usize| eig.vectors[(bare, col)].norm_sqr();

    let ground_col = (0..n)
        .max_by(|&a, &b| weight(0, a).total_cmp(&weight(0, b)).then(b.cmp(&a)))
        .expect("nonempty");
    let mut label = vec![usize::MAX; n];
    let mut claimed = vec![false; n];
    label[ground_col] = 0;
    claimed[0] = true;
    for col in (0..n).filter(|&c| c != ground_col) {
        let best = (0..n)
            .filter(|&b| !claimed[b])
            .max_by(|&a, &b| {
                let (wa, wb) = (weight(a, col), weight(b, col));
                if (wa - wb).abs() <= 1e-10 {
                    b.cmp(&a)
                } else {
                    wa.total_cmp(&wb)
                }
            })
            .expect("one unclaimed level per remaining state");
        label[col] = best;
        claimed[best] = true;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&c| label[c]);

    let u = DMatrix::from_fn(n, n, |r, c| eig.vectors[(r, order[c])]);
    let energies: Vec<f64> = order.iter().map(|&c| eig.values[c]).collect();
    let gaps: Vec<f64> = energies.iter().map(|e| energies[0] - e).collect();
    let spread = eig.values.last().copied().unwrap_or(0.0) - eig.values[0];
    let tol = DEGENERACY_TOL * spread.abs().max(f64::MIN_POSITIVE);
    if let Some(k) = (1..n).find(|&k| gaps[k].abs() <= tol) {
        return Err(EmitterError::DegenerateGap {
            level: k,
            gap: gaps[k],
        });
    }
    Ok(DressedBasis {
        u,
        energies,
        gaps,
        bare_label: order.iter().map(|&c| label[c]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emitter::{four_level, two_level, FourLevelParams};

    fn si(delta: f64, omega: f64) -> DMatrix<C64> {
        let (s, d) = four_level(FourLevelParams {
            delta,
            omega,
            lambda: 0.01,
            nu: 0.01,
            gamma1: 1.0,
            gamma3: 1.0,
        });
        build_driven_emitter(&s, &d, Regime::Rwa).unwrap()
    }

    #[test]
    fn four_level_matrix() {
        let h = si(2.5, 1.0);
        let expect = [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 2.5],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (h[(i, j)] - C64::new(expect[i][j], 0.0)).norm() < 1e-9,
                    "({i},{j})"
                );
            }
        }
    }

    #[test]
    fn four_level_dressing() {
        let b = dress(&si(2.5, 1.0)).unwrap();
        let e = [0.0, -1.0, 1.0, 2.5];
        for (a, x) in b.energies.iter().zip(e) {
            assert!((a - x).abs() < 1e-9);
        }
        let s = 0.5f64.sqrt();
        let expect = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -s, s, 0.0],
            [0.0, s, s, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (b.u[(i, j)] - C64::new(expect[i][j], 0.0)).norm() < 1e-9,
                    "U({i},{j}) = {}",
                    b.u[(i, j)]
                );
            }
        }
        assert_eq!(b.bare_label, vec![0, 1, 2, 3]);
    }

    #[test]
    fn undriven_is_identity() {
        let (s, d) = two_level(3.0, 0.5, 0.1, 0.0);
        let b = dress(&build_driven_emitter(&s, &d, Regime::Bare).unwrap()).unwrap();
        assert!((b.u.clone() - DMatrix::<C64>::identity(2, 2)).norm() < 1e-14);
        assert_eq!(b.gaps, vec![0.0, -3.0]);
    }

    #[test]
    fn bare_drive_gap() {
        let (w0, d) = (1.3, 0.4);
        let (s, mut drives) = two_level(w0, 0.1, 0.1, 0.0);
        drives.push(DriveSpec {
            transition: 0,
            kind: DriveKind::ClassicalBare { amplitude: d },
        });
        let h = build_driven_emitter(&s, &drives, Regime::Bare).unwrap();
        assert_eq!(h[(0, 1)], C64::new(d, 0.0));
        let b = dress(&h).unwrap();
        assert!((b.gaps[1].abs() - (w0 * w0 + 4.0 * d * d).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_gap() {
        let h = DMatrix::<C64>::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(5.0, 0.0),
        ]));
        assert!(matches!(
            dress(&h),
            Err(EmitterError::DegenerateGap { level: 1, .. })
        ));
    }

    #[test]
    fn mismatched_drive() {
        let (s, mut drives) = two_level(1.0, 0.1, 0.1, 0.0);
        drives.push(DriveSpec {
            transition: 0,
            kind: DriveKind::ClassicalBare { amplitude: 0.1 },
        });
        assert!(matches!(
            build_driven_emitter(&s, &drives, Regime::Rwa),
            Err(EmitterError::RegimeMismatch { drive: 1 })
        ));
    }
}
