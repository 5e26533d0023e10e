use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::EffectiveError;
use crate::emitter::{CoupledSystem, Regime};
use crate::ops::{ModePolynomial, Monomial, OperatorMatrix};

/// Leading-order excited-state admixture after a sudden displacement of a
/// field quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct Leakage {
    /// `Λ = φ a + φ* a†` with `|φ| = 1`.
    pub quadrature: ModePolynomial,
    /// Emitter operator `W` with `V = W ⊗ Λ`.
    pub emitter_operator: DMatrix<C64>,
    /// `x g W_n0 / (E_n − E_0)` per dressed level; zero for the ground.
    pub amplitudes: Vec<C64>,
}

/// Displacing the eigenvalues of `Λ` by `x` leaves amplitude
/// `x g W_n0 / (E_n − E_0)` on dressed level `n`, to first order in the
/// coupling. Only product-form (bare) couplings qualify.
pub fn displacement_leakage(
    sys: &CoupledSystem,
    mode: usize,
    x: f64,
) -> Result<Leakage, EffectiveError> {
    if sys.regime != Regime::Bare {
        return Err(EffectiveError::RequiresBare("displacement leakage"));
    }
    let n_modes = sys.n_modes();
    if mode >= n_modes {
        return Err(EffectiveError::ModeOutOfRange { mode, n_modes });
    }
    let (phi, w) = product_form(&sys.interactions[mode], mode)?;
    let n = sys.n_levels();
    let fmodes = sys.interactions[mode].n_modes();
    let mut lower = vec![(0, 0); fmodes];
    lower[mode] = (0, 1);
    let mut upper = vec![(0, 0); fmodes];
    upper[mode] = (1, 0);
    let (ma, mad) = (Monomial::from_powers(lower), Monomial::from_powers(upper));
    let g = sys.modes[mode].rate;
    let amplitudes = (0..n)
        .map(|k| {
            if k == 0 {
                C64::new(0.0, 0.0)
            } else {
                w[(k, 0)] * (x * g / (sys.energies[k] - sys.energies[0]))
            }
        })
        .collect();
    let quadrature = ModePolynomial::monomial(ma, phi) + ModePolynomial::monomial(mad, phi.conj());
    Ok(Leakage {
        quadrature,
        emitter_operator: w,
        amplitudes,
    })
}

/// Splits a bare interaction as `W ⊗ (φ a + φ* a†)` with `|φ| = 1`.
pub(crate) fn product_form(
    v: &OperatorMatrix,
    mode: usize,
) -> Result<(C64, DMatrix<C64>), EffectiveError> {
    let fmodes = v.n_modes();
    let n = v.dim();
    let mut lower = vec![(0, 0); fmodes];
    lower[mode] = (0, 1);
    let mut upper = vec![(0, 0); fmodes];
    upper[mode] = (1, 0);
    let (ma, mad) = (Monomial::from_powers(lower), Monomial::from_powers(upper));

    let entries = (0..n).flat_map(|i| (0..n).map(move |j| (i, j)));
    let phi = entries
        .clone()
        .map(|(i, j)| (v.get(i, j).coeff(&ma), v.get(i, j).coeff(&mad)))
        .find(|(a, b)| a.norm() > 0.0 && b.norm() > 0.0)
        .map(|(a, b)| {
            let p = (a / b).sqrt();
            p / p.norm()
        })
        .unwrap_or(C64::new(1.0, 0.0));

    let scale = v.max_abs();
    let mut w = DMatrix::<C64>::zeros(n, n);
    for (i, j) in entries {
        let p = v.get(i, j);
        let wij = p.coeff(&ma) / phi;
        let rebuilt = ModePolynomial::monomial(ma.clone(), wij * phi)
            + ModePolynomial::monomial(mad.clone(), wij * phi.conj());
        if p.max_diff(&rebuilt) > 1e-12 * scale {
            return Err(EffectiveError::NotProductForm { row: i, col: j });
        }
        w[(i, j)] = wij;
    }
    Ok((phi, w))
}
