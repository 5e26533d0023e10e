use num_complex::Complex64 as C64;

use crate::ops::{ModePolynomial, Monomial};

/// `1e-6 × max ω`.
pub fn default_tolerance(omega: &[f64]) -> f64 {
    1e-6 * omega.iter().fold(0.0f64, |m, w| m.max(w.abs()))
}

/// Keeps monomials whose oscillation frequency `Σ (j_m − k_m) ω_m` is at
/// most `tol` in magnitude. Number-conserving monomials always pass.
pub fn resonance_filter(poly: &ModePolynomial, omega: &[f64], tol: f64) -> ModePolynomial {
    poly.filter(|m, _| m.is_number_conserving() || m.frequency(omega).abs() <= tol)
}

/// Splits a polynomial into parts of equal oscillation frequency. Sorted
/// frequencies closer than `tol` to their neighbour share a part; parts are
/// labelled by their lowest frequency and ordered by it.
pub fn frequency_components(
    poly: &ModePolynomial,
    omega: &[f64],
    tol: f64,
) -> Vec<(f64, ModePolynomial)> {
    let mut terms: Vec<(f64, &Monomial, &C64)> = poly
        .terms()
        .map(|(m, c)| (m.frequency(omega), m, c))
        .collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, Vec<(Monomial, C64)>)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (f, m, c) in terms {
        if out.is_empty() || f - last > tol {
            out.push((f, Vec::new()));
        }
        last = f;
        out.last_mut()
            .expect("group exists")
            .1
            .push((m.clone(), *c));
    }
    out.into_iter()
        .map(|(f, t)| {
            (
                f,
                ModePolynomial::from_terms(poly.n_modes(), t).expect("same mode count"),
            )
        })
        .collect()
}
