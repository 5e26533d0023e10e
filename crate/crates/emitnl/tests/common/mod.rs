#![allow(dead_code)]

use emitnl::emitter::{CoupledSystem, ModeInfo, Regime};
use emitnl::ops::{ModePolynomial, Monomial, OperatorMatrix};
use emitnl::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cplx(r: &mut impl Rng) -> C64 {
    C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

pub fn mono(p: &[(u32, u32)]) -> Monomial {
    Monomial::from_powers(p.to_vec())
}

/// Random polynomial with degree at most `max_deg`, `terms` monomials.
pub fn random_poly(r: &mut impl Rng, n_modes: usize, max_deg: u32, terms: usize) -> ModePolynomial {
    let mut out = ModePolynomial::zero(n_modes);
    for _ in 0..terms {
        let mut pw = vec![(0u32, 0u32); n_modes];
        let mut budget = r.random_range(0..=max_deg);
        while budget > 0 {
            let m = r.random_range(0..n_modes);
            if r.random_bool(0.5) {
                pw[m].0 += 1;
            } else {
                pw[m].1 += 1;
            }
            budget -= 1;
        }
        out = out + ModePolynomial::monomial(Monomial::from_powers(pw), cplx(r));
    }
    out
}

/// Energies with ground 0 and excited levels at least `min_gap` away.
pub fn random_energies(r: &mut impl Rng, n: usize, min_gap: f64) -> Vec<f64> {
    let mut e = vec![0.0];
    while e.len() < n {
        let x = r.random_range(-3.0..3.0);
        if e.iter().all(|y: &f64| (x - y).abs() > min_gap) {
            e.push(x);
        }
    }
    e
}

/// Hermitian, zero-diagonal interaction for `mode` built from `a`, `a†`
/// and, when `nonlinear`, quadratic pieces.
pub fn random_interaction(
    r: &mut impl Rng,
    n: usize,
    n_modes: usize,
    mode: usize,
    nonlinear: bool,
) -> OperatorMatrix {
    let a = ModePolynomial::annihilate(n_modes, mode);
    let ad = ModePolynomial::create(n_modes, mode);
    let mut m = OperatorMatrix::zeros(n, n_modes);
    for i in 0..n {
        for j in i + 1..n {
            if r.random_bool(0.15) {
                continue;
            }
            let mut p = a.scale(cplx(r)) + ad.scale(cplx(r));
            if nonlinear {
                let other = r.random_range(0..n_modes);
                let b = ModePolynomial::create(n_modes, other);
                p = p + (&ad * &b).scale(cplx(r).scale(0.3));
            }
            m.set(j, i, p.dagger());
            m.set(i, j, p);
        }
    }
    m
}

pub fn modes(n_modes: usize) -> Vec<ModeInfo> {
    (0..n_modes)
        .map(|m| ModeInfo {
            name: ["a", "b", "c", "d"][m].into(),
            frequency: 1.0 + m as f64,
            rate: 1.0,
            ground_coupled: None,
        })
        .collect()
}

pub fn random_system(
    r: &mut impl Rng,
    n_levels: usize,
    n_modes: usize,
    nonlinear: bool,
) -> CoupledSystem {
    let e = random_energies(r, n_levels, 0.3);
    let ints = (0..n_modes)
        .map(|m| random_interaction(r, n_levels, n_modes, m, nonlinear))
        .collect();
    CoupledSystem::from_parts(e, modes(n_modes), ints, Regime::Bare).unwrap()
}

/// Undriven two-level emitter in the rotating frame, `V₀₁ = a†`.
pub fn two_level_rwa(delta: f64) -> CoupledSystem {
    let mut v = OperatorMatrix::zeros(2, 1);
    v.set(0, 1, ModePolynomial::create(1, 0));
    v.set(1, 0, ModePolynomial::annihilate(1, 0));
    CoupledSystem::from_parts(vec![0.0, delta], modes(1), vec![v], Regime::Rwa).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn report(name: &str, pass: bool, detail: &str) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

/// Bare single-mode system `W ⊗ (a + a†)` with real symmetric zero-diagonal `W`.
pub fn product_form_system(r: &mut impl Rng, levels: usize) -> CoupledSystem {
    let mut w = DMatrix::<C64>::zeros(levels, levels);
    for i in 0..levels {
        for j in i + 1..levels {
            let x: f64 = r.random_range(-1.0..1.0);
            w[(i, j)] = C64::new(x, 0.0);
            w[(j, i)] = C64::new(x, 0.0);
        }
    }
    let v = OperatorMatrix::product(&w, &ModePolynomial::quadrature(1, 0));
    CoupledSystem::from_parts(
        random_energies(r, levels, 0.3),
        modes(1),
        vec![v],
        Regime::Bare,
    )
    .unwrap()
}
