//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines reach the terminal
//! uncaptured. Exits nonzero when a criterion fails, unless the failure is
//! listed as a known deviation.

mod common;

use std::process::ExitCode;

use common::*;
use emitnl::effective::{effective_model, transition_operator, ModelOptions};
use emitnl::emitter::{
    coupled_system, four_level, two_level, CoupledSystem, DriveKind, DriveSpec, FourLevelParams,
    Level, LevelScheme, Regime, Transition,
};
use emitnl::ensemble::{
    collective_matrix, coupling_bounds, displacement_norm, ensemble_expansion, kerr_scaling_report,
    scaling_identity_check, semiclassical_residual, symmetric_operator, KerrScheme,
};
use emitnl::ops::{FockTruncation, ModePolynomial, OperatorMatrix};
use emitnl::tipt::{expand_levels, expand_recursive, MultiIndex, RecursionOptions};
use emitnl::validation::units::{
    chi3_four_level, chi3_from_kerr, field_from_intensity, intensity, rabi_from_beam,
    refractive_index, FieldUnits, DEBYE, EPSILON_0, HBAR,
};
use emitnl::validation::{
    exact_ground_manifold, expansion_coefficients, fitted_coefficients_adaptive,
    four_level_kerr_rate, nscaling_curves, quadrature_nodes, JointModel, NscalingOptions,
};
use emitnl::C64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
    /// Why a failure is expected; such a failure does not fail the run.
    known: Option<&'static str>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self {
            pass,
            detail,
            known: None,
        }
    }
}

fn idx(v: &[u32]) -> MultiIndex {
    MultiIndex::new(v.to_vec())
}

/// Keeps the largest error seen; NaN sticks.
fn worst(acc: &mut f64, x: f64) {
    if x.is_nan() || x > *acc {
        *acc = x;
    }
}

// 1 ---------------------------------------------------------------------

fn four_level_closed_forms() -> Outcome {
    let mut r = rng(101);
    let (mut kerr, mut selfk, mut low, mut sigma, mut gamma) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut dissipators_ok = true;
    for _ in 0..50 {
        let delta = r.random_range(0.5..5.0);
        let omega = r.random_range(0.5..5.0);
        let bound = 0.05 * f64::min(delta, omega);
        let lambda = r.random_range(0.05..1.0) * bound;
        let nu = r.random_range(0.05..1.0) * bound;
        let (g1, g3) = (r.random_range(0.1..3.0), r.random_range(0.1..3.0));
        let (s, d) = four_level(FourLevelParams {
            delta,
            omega,
            lambda,
            nu,
            gamma1: g1,
            gamma3: g3,
        });
        let sys = coupled_system(&s, &d, Regime::Rwa).unwrap();
        let series = expand_recursive(&sys, 0, 4).unwrap();
        let scale = 1.0 / (delta * omega * omega);

        let e22 = series.eigenvalue(&idx(&[2, 2])).unwrap();
        let expect = ModePolynomial::monomial(mono(&[(1, 1), (1, 1)]), C64::new(-scale, 0.0));
        worst(&mut kerr, e22.max_diff(&expect) / scale);
        for j in [[4, 0], [0, 4]] {
            worst(
                &mut selfk,
                series.eigenvalue(&idx(&j)).unwrap().max_abs() / scale,
            );
        }
        for t in 1..=3 {
            for j in MultiIndex::with_total(2, t) {
                worst(&mut low, series.eigenvalue(&j).unwrap().max_abs() / scale);
            }
        }

        let amp = lambda * nu / (delta * omega);
        let s1 = transition_operator(&sys, &series, 1, 2).unwrap();
        let s3 = transition_operator(&sys, &series, 3, 2).unwrap();
        let ab = ModePolynomial::monomial(mono(&[(0, 1), (0, 1)]), C64::new(amp, 0.0));
        worst(&mut sigma, s1.max_abs() / amp);
        worst(&mut sigma, s3.max_diff(&ab) / amp);

        let model = effective_model(&sys, Some(&s), ModelOptions::default()).unwrap();
        let g = g3 * (lambda / delta).powi(2) * (nu / omega).powi(2);
        match model.dissipators.as_slice() {
            [one] if one.level == 3 => worst(&mut gamma, rel(one.rate, g)),
            _ => dissipators_ok = false,
        }
    }
    let pass = kerr < 1e-10
        && selfk < 1e-12
        && low < 1e-12
        && sigma < 1e-10
        && gamma < 1e-10
        && dissipators_ok;
    Outcome::new(
        pass,
        format!(
            "50 sets: E22 {kerr:.1e}, E40/E04 {selfk:.1e}, orders 1-3 {low:.1e}, Σ {sigma:.1e}, γ {gamma:.1e}, one dissipator {dissipators_ok}"
        ),
    )
}

// 2 ---------------------------------------------------------------------

fn catalan(m: u64) -> f64 {
    // C_m = binom(2m, m)/(m + 1)
    let b = (1..=m).fold(1u64, |acc, i| acc * (m + i) / i);
    (b / (m + 1)) as f64
}

fn two_level_catalan() -> Outcome {
    let delta = 1.3;
    let (s, d) = two_level(10.0, delta, 0.01, 0.0);
    let sys = coupled_system(&s, &d, Regime::Rwa).unwrap();
    let series = expand_recursive(&sys, 0, 12).unwrap();
    let mut ok = true;
    let mut got = Vec::new();
    for k in 1..=12u32 {
        let e = series.eigenvalue(&idx(&[k])).unwrap();
        if k % 2 == 1 {
            ok &= e.max_abs() < 1e-12;
            continue;
        }
        let h = k / 2;
        let expect = if h % 2 == 1 { -1.0 } else { 1.0 } * catalan(u64::from(h) - 1);
        let nf = e.number_form();
        let lead = nf.get(&vec![h]).map_or(0.0, |c| c.re) * delta.powi(k as i32 - 1);
        let rest = nf
            .iter()
            .filter(|(p, _)| **p != vec![h])
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        ok &= (lead - expect).abs() < 1e-9 && rest * delta.powi(k as i32 - 1) < 1e-9;
        got.push(format!("{lead:.0}"));
    }
    Outcome::new(
        ok,
        format!("Δ^(2k-1) E_2k = {}; odd orders zero", got.join(", ")),
    )
}

// 3 ---------------------------------------------------------------------

fn ensemble_formulas() -> Outcome {
    let delta = 1.4;
    let n_op = ModePolynomial::number(1, 0);
    let mut err = 0.0f64;
    for n in [2usize, 3, 5, 8] {
        let nf = n as f64;
        let s =
            ensemble_expansion(&collective_matrix(&two_level_rwa(delta), n).unwrap(), 4).unwrap();
        let e2 = n_op.scale_re(-nf / delta);
        let e4 = (&n_op * &n_op).scale_re(nf / delta.powi(3))
            + n_op.scale_re(nf * (nf - 1.0) / delta.powi(3));
        worst(&mut err, s.eigenvalue(&idx(&[2])).unwrap().rel_diff(&e2));
        worst(&mut err, s.eigenvalue(&idx(&[4])).unwrap().rel_diff(&e4));
    }
    let (s, d) = four_level(FourLevelParams {
        delta: 2.0,
        omega: 1.1,
        lambda: 0.01,
        nu: 0.02,
        gamma1: 0.0,
        gamma3: 0.0,
    });
    let sys = coupled_system(&s, &d, Regime::Rwa).unwrap();
    let single = expand_recursive(&sys, 0, 4)
        .unwrap()
        .eigenvalue(&idx(&[2, 2]))
        .unwrap()
        .clone();
    let mut cross = 0.0f64;
    for n in [2usize, 3, 5, 8] {
        let e = ensemble_expansion(&collective_matrix(&sys, n).unwrap(), 4).unwrap();
        worst(
            &mut cross,
            e.eigenvalue(&idx(&[2, 2]))
                .unwrap()
                .rel_diff(&single.scale_re(n as f64)),
        );
    }
    Outcome::new(
        err < 1e-11 && cross < 1e-11,
        format!("two-level E2, E4 for N = 2, 3, 5, 8: {err:.1e}; four-level cross-Kerr vs N × single: {cross:.1e}"),
    )
}

// 4 ---------------------------------------------------------------------

fn scaling_identity() -> Outcome {
    let mut r = rng(104);
    let mut zero = 0;
    for t in 0..20 {
        let sys = product_form_system(&mut r, 3 + t % 2);
        let n = r.random_range(2..=8);
        let chk = scaling_identity_check(&sys, n).unwrap();
        if chk.difference.is_zero() && chk.correction.is_zero() {
            zero += 1;
        }
    }
    let delta = 0.8;
    let mut tls = 0.0f64;
    for n in [2usize, 3, 5, 8] {
        let chk = scaling_identity_check(&two_level_rwa(delta), n).unwrap();
        let expect = ModePolynomial::number(1, 0).scale_re((n * (n - 1)) as f64 / delta.powi(3));
        worst(&mut tls, chk.correction.rel_diff(&expect));
        worst(&mut tls, chk.difference.rel_diff(&expect));
    }
    Outcome::new(
        zero == 20 && tls < 1e-11,
        format!("bare product form: {zero}/20 differences identically zero; two-level N(N-1)n/Δ³: {tls:.1e}"),
    )
}

// 5 ---------------------------------------------------------------------

fn level(label: &str, energy: f64) -> Level {
    Level {
        label: label.into(),
        energy,
        decay_rate: 0.0,
        decays_to_ground: false,
    }
}

fn quantized(transition: usize, name: &str, coupling: C64, frequency: f64) -> DriveSpec {
    DriveSpec {
        transition,
        kind: DriveKind::Quantized {
            name: name.into(),
            coupling,
            frequency,
            ground_coupled: None,
        },
    }
}

/// Random three-level Λ, ladder or V scheme with a mode on the ground
/// transition and a second mode or classical drive on the other.
fn random_scheme(r: &mut impl Rng, regime: Regime) -> CoupledSystem {
    loop {
        let shape = r.random_range(0..3);
        let w2 = r.random_range(2.0..4.0);
        let (third, t1) = match shape {
            0 => (10.0 - w2, (2, 1)),
            1 => (10.0 + w2, (1, 2)),
            _ => (10.0 + w2, (0, 2)),
        };
        let scheme = LevelScheme {
            levels: vec![level("g", 0.0), level("e", 10.0), level("f", third)],
            transitions: vec![
                Transition {
                    lower: 0,
                    upper: 1,
                    dipole: None,
                },
                Transition {
                    lower: t1.0,
                    upper: t1.1,
                    dipole: None,
                },
            ],
        };
        let w_t1 = scheme.levels[t1.1].energy - scheme.levels[t1.0].energy;
        let detuning = |r: &mut dyn rand::RngCore| {
            let x: f64 = r.random_range(0.5..2.0);
            if r.random_bool(0.5) {
                x
            } else {
                -x
            }
        };
        let coupling = |r: &mut dyn rand::RngCore| match regime {
            Regime::Rwa => C64::from_polar(
                r.random_range(0.5..1.0),
                r.random_range(0.0..std::f64::consts::TAU),
            ),
            Regime::Bare => C64::new(r.random_range(0.5..1.0), 0.0),
        };
        let mut drives = vec![quantized(0, "a", coupling(r), 10.0 - detuning(r))];
        // a classical drive on the ground transition would dress the ground
        if shape == 2 || r.random_bool(0.5) {
            drives.push(quantized(1, "b", coupling(r), w_t1 - detuning(r)));
        } else {
            let kind = match regime {
                Regime::Rwa => DriveKind::ClassicalRwa {
                    amplitude: C64::from_polar(
                        r.random_range(0.3..1.0),
                        r.random_range(0.0..std::f64::consts::TAU),
                    ),
                    frequency: Some(w_t1 - detuning(r)),
                },
                Regime::Bare => DriveKind::ClassicalBare {
                    amplitude: r.random_range(0.2..0.6),
                },
            };
            drives.push(DriveSpec {
                transition: 1,
                kind,
            });
        }
        let Ok(sys) = coupled_system(&scheme, &drives, regime) else {
            continue;
        };
        let gap = sys.energies[1..]
            .iter()
            .map(|e| (e - sys.energies[0]).abs())
            .fold(f64::INFINITY, f64::min);
        if gap >= 0.3 {
            return sys.with_rates(&vec![1.0; sys.n_modes()]);
        }
    }
}

fn max_rel(a: &DMatrix<C64>, b: &DMatrix<C64>, scale: f64) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale
}

fn polar_fit() -> Outcome {
    let mut r = rng(105);
    let mut parts = Vec::new();
    let mut pass = true;
    for regime in [Regime::Rwa, Regime::Bare] {
        let mut err = 0.0f64;
        let mut schemes = 0;
        for _ in 0..10 {
            let sys = random_scheme(&mut r, regime);
            let t = FockTruncation::uniform(sys.n_modes(), 8).unwrap();
            let gap = sys.energies[1..]
                .iter()
                .map(|e| (e - sys.energies[0]).abs())
                .fold(f64::INFINITY, f64::min);
            let vmax = sys
                .interactions
                .iter()
                .map(|v| v.max_abs())
                .fold(0.0, f64::max);
            let (Ok((_, fit)), Ok(exp)) = (
                fitted_coefficients_adaptive(&sys, &t, 0.02 * gap / vmax, 4),
                expansion_coefficients(&sys, &t, 4),
            ) else {
                pass = false;
                continue;
            };
            schemes += 1;
            let scale2 = exp[2].iter().map(|c| c.norm()).fold(0.0, f64::max);
            for order in 0..=4 {
                let s = exp[order]
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0, f64::max)
                    .max(scale2);
                worst(&mut err, max_rel(&fit[order], &exp[order], s));
            }
        }
        pass &= schemes == 10 && err < 1e-5;
        parts.push(format!(
            "{regime:?} {schemes}/10 schemes, worst per-order error {err:.1e}"
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

// 6 ---------------------------------------------------------------------

fn nscaling() -> Outcome {
    let opts = NscalingOptions::standard(1.0);
    let bare = nscaling_curves(Regime::Bare, &[1, 10], &opts).unwrap();
    let mut bare_err = 0.0f64;
    for (a, b) in bare[0].points.iter().zip(&bare[1].points) {
        worst(&mut bare_err, rel(a.error.unwrap(), b.error.unwrap()));
        worst(
            &mut bare_err,
            rel(a.abs_error.unwrap(), b.abs_error.unwrap()),
        );
    }
    let bare_ok = bare_err < 1e-9;

    let rwa = nscaling_curves(Regime::Rwa, &[1, 10], &opts).unwrap();
    let (ten, companion) = (&rwa[1], &rwa[2]);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (p, q) in ten.points.iter().zip(&companion.points) {
        if !(0.0173..=0.173).contains(&p.lambda) {
            continue;
        }
        let ratio = p.error.unwrap() / q.error.unwrap();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let rwa_ok = lo >= 0.5 && hi <= 2.0;
    Outcome {
        pass: bare_ok && rwa_ok,
        detail: format!(
            "bare N=1 vs N=10 pointwise {bare_err:.1e}; rotating-wave N=10 / (N=1 at λ·10^(1/6)) in [{lo:.1}, {hi:.1}] over λ/Δ ∈ [0.0173, 0.173]"
        ),
        known: (bare_ok && !rwa_ok).then_some("the N=10 error grows faster than a λ·N^(1/6) rescaling predicts"),
    }
}

// 7 ---------------------------------------------------------------------

/// `Σ_i h^{(i)}` on the explicit `M^N` product space.
fn tensor_sum(h: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let m = h.nrows();
    let dim = m.pow(n as u32);
    let digits = |mut x: usize| {
        let mut d = vec![0; n];
        for slot in d.iter_mut().rev() {
            *slot = x % m;
            x /= m;
        }
        d
    };
    let all: Vec<Vec<usize>> = (0..dim).map(digits).collect();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for (col, dc) in all.iter().enumerate() {
        for (row, dr) in all.iter().enumerate() {
            let differ: Vec<usize> = (0..n).filter(|&k| dr[k] != dc[k]).collect();
            out[(row, col)] = match differ.as_slice() {
                [] => (0..n).map(|i| h[(dr[i], dc[i])]).sum(),
                [i] => h[(dr[*i], dc[*i])],
                _ => C64::new(0.0, 0.0),
            };
        }
    }
    out
}

/// Eigenvalue whose eigenvector overlaps most with basis state 0.
fn tracked_ground(h: &DMatrix<C64>) -> f64 {
    let e = h.clone().symmetric_eigen();
    let col = (0..e.eigenvalues.len())
        .max_by(|&a, &b| {
            e.eigenvectors[(0, a)]
                .norm_sqr()
                .total_cmp(&e.eigenvectors[(0, b)].norm_sqr())
        })
        .unwrap();
    e.eigenvalues[col]
}

fn collective_bare_manifold() -> Outcome {
    let mut r = rng(107);
    let mut err = 0.0f64;
    let mut cases = 0;
    for levels in [2usize, 3] {
        for _ in 0..2 {
            let sys = product_form_system(&mut r, levels).with_rates(&[0.05]);
            let t = FockTruncation::uniform(1, 8).unwrap();
            let single =
                exact_ground_manifold(&JointModel::new(&sys, t.clone()).unwrap(), 3).unwrap();
            let w = DMatrix::from_fn(levels, levels, |i, j| {
                sys.interactions[0].get(i, j).coeff_of(&[(1, 0)])
            });
            let h0 = DMatrix::from_diagonal(&DVector::from_iterator(
                levels,
                sys.energies.iter().map(|&e| C64::new(e, 0.0)),
            ));
            for n in 1..=6usize {
                let c = symmetric_operator(&sys, n).unwrap();
                let many =
                    exact_ground_manifold(&JointModel::collective(&c, t.clone()).unwrap(), 3)
                        .unwrap();
                for ((a, b), xi) in many.iter().zip(&single).zip(quadrature_nodes(3)) {
                    let nf = n as f64;
                    worst(&mut err, rel(a.energy, nf * b.energy));
                    // the same energy from the explicit product space
                    let h = &h0 + w.scale(0.05 * xi);
                    worst(
                        &mut err,
                        rel(tracked_ground(&tensor_sum(&h, n)), nf * b.energy),
                    );
                }
                cases += 1;
            }
        }
    }
    Outcome::new(
        err < 1e-10,
        format!("{cases} ensembles (M = 2, 3; N ≤ 6) at every quadrature probe: {err:.1e}"),
    )
}

// 8 ---------------------------------------------------------------------

/// Closed-form eigenvector coefficients of level `n` for two modes with
/// zero-diagonal interactions `V` (mode 0) and `X` (mode 1).
struct Forms<'a> {
    e: &'a [f64],
    v: &'a OperatorMatrix,
    x: &'a OperatorMatrix,
    n: usize,
}

impl Forms<'_> {
    fn d(&self, k: usize) -> f64 {
        self.e[self.n] - self.e[k]
    }

    fn others(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.e.len()).filter(move |&k| k != self.n)
    }

    fn vvv(&self, a: usize, b: usize, c: usize, d: usize) -> ModePolynomial {
        &(self.v.get(a, b) * self.v.get(b, c)) * self.v.get(c, d)
    }

    /// Every distinct placement of one `X` among two `V`s along `a→b→c→d`.
    fn allp(&self, a: usize, b: usize, c: usize, d: usize) -> ModePolynomial {
        let (v, x) = (self.v, self.x);
        &(v.get(a, b) * v.get(b, c)) * x.get(c, d)
            + &(v.get(a, b) * x.get(b, c)) * v.get(c, d)
            + &(x.get(a, b) * v.get(b, c)) * v.get(c, d)
    }

    fn zero(&self) -> ModePolynomial {
        ModePolynomial::zero(2)
    }

    fn off(&self, l: usize, j: [u32; 2]) -> ModePolynomial {
        let (v, x, n) = (self.v, self.x, self.n);
        let dl = self.d(l);
        let mid = || self.others().filter(move |&q| q != l);
        match j {
            [1, 0] => v.get(l, n).scale_re(1.0 / dl),
            [2, 0] => mid().fold(self.zero(), |s, q| {
                s + (v.get(l, q) * v.get(q, n)).scale_re(1.0 / (dl * self.d(q)))
            }),
            [3, 0] => {
                let mut s = self.zero();
                for q in mid() {
                    for k in self.others().filter(|&k| k != q) {
                        s = s + self
                            .vvv(l, q, k, n)
                            .scale_re(1.0 / (dl * self.d(q) * self.d(k)));
                    }
                }
                for q in self.others() {
                    let p = self.vvv(l, n, q, n);
                    let dq = self.d(q);
                    s = s - p.scale_re(0.5 / (dl * dq * dq)) - p.scale_re(1.0 / (dq * dl * dl));
                }
                s
            }
            [1, 1] => mid().fold(self.zero(), |s, q| {
                s + (v.get(l, q) * x.get(q, n) + x.get(l, q) * v.get(q, n))
                    .scale_re(1.0 / (dl * self.d(q)))
            }),
            [2, 1] => {
                let mut s = self.zero();
                for q in mid() {
                    for p in self.others().filter(|&p| p != q) {
                        s = s + self
                            .allp(l, q, p, n)
                            .scale_re(1.0 / (dl * self.d(q) * self.d(p)));
                    }
                }
                for q in self.others() {
                    let dq = self.d(q);
                    s = s - self
                        .allp(l, n, q, n)
                        .scale_re((1.0 / dl + 0.5 / dq) / (dl * dq));
                }
                s
            }
            _ => unreachable!(),
        }
    }

    fn diag(&self, j: [u32; 2]) -> ModePolynomial {
        let (v, x, n) = (self.v, self.x, self.n);
        match j {
            [1, 0] => self.zero(),
            [2, 0] => self.others().fold(self.zero(), |s, l| {
                s + (v.get(n, l) * v.get(l, n)).scale_re(-0.5 / self.d(l).powi(2))
            }),
            [3, 0] => {
                let mut s = self.zero();
                for k in self.others() {
                    for q in self.others() {
                        let (dk, dq) = (self.d(k), self.d(q));
                        s = s + self
                            .vvv(n, k, q, n)
                            .scale_re(-0.5 * (1.0 / dk + 1.0 / dq) / (dk * dq));
                    }
                }
                s
            }
            [1, 1] => self.others().fold(self.zero(), |s, k| {
                s + (v.get(n, k) * x.get(k, n) + x.get(n, k) * v.get(k, n))
                    .scale_re(-0.5 / self.d(k).powi(2))
            }),
            [2, 1] => {
                let mut s = self.zero();
                for l in self.others() {
                    for q in self.others() {
                        let (dl, dq) = (self.d(l), self.d(q));
                        s = s + self
                            .allp(n, l, q, n)
                            .scale_re(-0.5 * (1.0 / dl + 1.0 / dq) / (dl * dq));
                    }
                }
                s
            }
            _ => unreachable!(),
        }
    }
}

fn eigenvector_forms() -> Outcome {
    let mut r = rng(108);
    let mut err = 0.0f64;
    for t in 0..20 {
        let levels = 3 + t % 3;
        let sys = random_system(&mut r, levels, 2, t % 2 == 1);
        let n = r.random_range(0..levels);
        let series = expand_levels(
            &sys.energies,
            &sys.interactions,
            n,
            3,
            RecursionOptions::default(),
        )
        .unwrap();
        let forms = Forms {
            e: &sys.energies,
            v: &sys.interactions[0],
            x: &sys.interactions[1],
            n,
        };
        for j in [[1u32, 0], [2, 0], [3, 0], [1, 1], [2, 1]] {
            let expect: Vec<ModePolynomial> = (0..levels)
                .map(|l| {
                    if l == n {
                        forms.diag(j)
                    } else {
                        forms.off(l, j)
                    }
                })
                .collect();
            let scale = expect
                .iter()
                .map(|p| p.max_abs())
                .fold(0.0, f64::max)
                .max(1e-300);
            for (l, e) in expect.iter().enumerate() {
                let got = series.eigenvector_coefficient(l, &idx(&j)).unwrap();
                worst(&mut err, got.max_diff(e) / scale);
            }
        }
    }
    Outcome::new(
        err < 1e-11,
        format!("nine forms on 20 random two-mode systems: {err:.1e}"),
    )
}

// 9 ---------------------------------------------------------------------

/// Normalized symmetrization of the product states with these occupations.
fn symmetric_vector(occ: &[u32], m: usize, n: usize) -> DVector<C64> {
    let dim = m.pow(n as u32);
    let mut v = DVector::<C64>::zeros(dim);
    for x in 0..dim {
        let mut counts = vec![0u32; m];
        let mut y = x;
        for _ in 0..n {
            counts[y % m] += 1;
            y /= m;
        }
        if counts[1..] == *occ {
            v[x] = C64::new(1.0, 0.0);
        }
    }
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

fn collective_rules() -> Outcome {
    let mut r = rng(109);
    let (mut rules, mut matrix) = (0.0f64, 0.0f64);
    let mut checked = [0usize; 6];
    for m in 2..=4usize {
        for n in 1..=4usize {
            let mut w = DMatrix::<C64>::zeros(m, m);
            for i in 0..m {
                for j in i + 1..m {
                    let x = cplx(&mut r);
                    w[(i, j)] = x;
                    w[(j, i)] = x.conj();
                }
            }
            let big = tensor_sum(&w, n);
            let occ = |pairs: &[(usize, u32)]| {
                let mut o = vec![0u32; m - 1];
                for &(j, k) in pairs {
                    o[j - 1] += k;
                }
                o
            };
            let el = |a: &[u32], b: &[u32]| {
                (symmetric_vector(a, m, n).adjoint() * &big * symmetric_vector(b, m, n))[(0, 0)]
            };
            let nf = n as f64;
            let mut check = |rule: usize, got: C64, expect: C64| {
                worst(&mut rules, (got - expect).norm());
                checked[rule] += 1;
            };
            for j in 1..m {
                check(0, el(&occ(&[(j, 1)]), &occ(&[])), w[(j, 0)] * nf.sqrt());
                for k in 0..n as u32 {
                    let f = (((n as u32 - k) * (k + 1)) as f64).sqrt();
                    check(1, el(&occ(&[(j, k + 1)]), &occ(&[(j, k)])), w[(j, 0)] * f);
                }
                for k in 1..m {
                    check(2, el(&occ(&[(k, 1)]), &occ(&[(j, 1)])), w[(k, j)]);
                    if k == j || n < 2 {
                        continue;
                    }
                    check(
                        3,
                        el(&occ(&[(k, 1), (j, 1)]), &occ(&[(j, 1)])),
                        w[(k, 0)] * (nf - 1.0).sqrt(),
                    );
                    check(
                        4,
                        el(&occ(&[(k, 1), (j, 1)]), &occ(&[(j, 2)])),
                        w[(k, j)] * 2f64.sqrt(),
                    );
                    for l in (1..m).filter(|&l| l != j && l != k) {
                        check(
                            5,
                            el(&occ(&[(l, 1), (j, 1)]), &occ(&[(k, 1), (j, 1)])),
                            w[(l, k)],
                        );
                    }
                }
            }
            if m <= 3 {
                let v =
                    OperatorMatrix::from_fn(m, 1, |i, j| ModePolynomial::constant(1, w[(i, j)]))
                        .unwrap();
                let sys = CoupledSystem::from_parts(
                    random_energies(&mut r, m, 0.3),
                    modes(1),
                    vec![v],
                    Regime::Rwa,
                )
                .unwrap();
                let c = collective_matrix(&sys, n).unwrap();
                for (a, sa) in c.basis.iter().enumerate() {
                    for (b, sb) in c.basis.iter().enumerate() {
                        let got = c.system.interactions[0].get(a, b).scalar();
                        worst(
                            &mut matrix,
                            (el(&sa.occupations, &sb.occupations) - got).norm(),
                        );
                    }
                }
            }
        }
    }
    let all_seen = checked.iter().all(|&c| c > 0);
    Outcome::new(
        rules < 1e-12 && matrix < 1e-12 && all_seen,
        format!(
            "six rules vs product space ({} elements, M ≤ 4): {rules:.1e}; collective matrix N ≤ 4, M ≤ 3: {matrix:.1e}",
            checked.iter().sum::<usize>()
        ),
    )
}

// 10 --------------------------------------------------------------------

fn bounds_and_kerr() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in [1usize, 10, 100] {
        let nf = n as f64;
        let tls = kerr_scaling_report(KerrScheme::Tls { delta: 1.0 }, n, &[1.0]);
        let si = kerr_scaling_report(
            KerrScheme::FourLevel {
                delta: 3.0,
                omega: 0.5,
            },
            n,
            &[2.0, 3.0],
        );
        let bare = coupling_bounds(Regime::Bare, n, &[true], &[1.0], &[4.0]);
        // two-level: λ = Δ/√(N n), κ = Nλ⁴/Δ³ = Δ/(N n²)
        ok &= rel(tls.couplings[0], 1.0 / nf.sqrt()) < 1e-14 && rel(tls.rate, 1.0 / nf) < 1e-14;
        ok &= (tls.exponent + 1.0).abs() < 1e-12;
        // four-level: λ = Ω/√(N n_a), ν = Δ/√n_b, κ = Δ/(n_a n_b)
        ok &= rel(si.couplings[0], 0.5 / (2.0 * nf).sqrt()) < 1e-14
            && rel(si.couplings[1], 3.0 / 3f64.sqrt()) < 1e-14;
        ok &= rel(si.rate, 0.5) < 1e-14 && si.exponent.abs() < 1e-12;
        ok &= bare == vec![0.5];
        rows.push(format!(
            "N={n}: κ_TLS {:.3e} κ_4L {:.3e}",
            tls.rate, si.rate
        ));
    }
    Outcome::new(
        ok,
        format!(
            "{}; exponents -1 and 0; bare bound N-independent",
            rows.join(", ")
        ),
    )
}

// 11 --------------------------------------------------------------------

fn semiclassical() -> Outcome {
    let mut norm = 0.0f64;
    for a in [1.0, 3.0, 10.0] {
        worst(
            &mut norm,
            (displacement_norm(C64::from_polar(a, 0.7), 200).unwrap() - 1.0).abs(),
        );
    }
    let (s, d) = two_level(10.0, 1.0, 0.2, 0.0);
    let rwa = coupled_system(&s, &d, Regime::Rwa).unwrap();
    let (s, d) = two_level(1.0, 0.0, 0.2, 0.0);
    let bare = coupled_system(&s, &d, Regime::Bare).unwrap();
    let mut ratios = Vec::new();
    for (sys, level, phase) in [(&rwa, 1, 0.3), (&bare, 0, 0.0)] {
        for (a, b) in [(3.0, 6.0), (5.0, 10.0)] {
            let ra = semiclassical_residual(sys, level, C64::from_polar(a, phase), 200)
                .unwrap()
                .relative;
            let rb = semiclassical_residual(sys, level, C64::from_polar(b, phase), 200)
                .unwrap()
                .relative;
            ratios.push(rb / ra);
        }
    }
    let halves = ratios.iter().all(|q| (q - 0.5).abs() <= 0.05);
    let shown: Vec<String> = ratios.iter().map(|q| format!("{q:.3}")).collect();
    Outcome::new(
        norm < 1e-8 && halves,
        format!(
            "‖(a†−α*)|α⟩‖ − 1 ≤ {norm:.1e} for |α| = 1, 3, 10; residual ratios on doubling α: {}",
            shown.join(", ")
        ),
    )
}

// 12 --------------------------------------------------------------------

fn unit_conversions() -> Outcome {
    let mut ok = true;
    let u = FieldUnits {
        dipole: DEBYE,
        frequency: 2.37e15,
        mode_volume: Some(4.24e-11),
        photons: Some(20.0),
        ..Default::default()
    };
    let b = rabi_from_beam(&u).unwrap();
    let g = b.coupling.unwrap();
    ok &= b.rabi == g * 20f64.sqrt();
    ok &= rel(
        g,
        DEBYE * (2.0 * 2.37e15 / (EPSILON_0 * HBAR * 4.24e-11)).sqrt(),
    ) < 1e-15;

    let mut chi = 0.0f64;
    let n_d = 1e24;
    for (delta, omega) in [(2e9, 1e9), (5e8, 3e9), (1.3e10, 7e8)] {
        let (mu12, mu34) = (1.7 * DEBYE, 0.6 * DEBYE);
        let closed =
            n_d * mu12.powi(2) * mu34.powi(2) / (EPSILON_0 * HBAR.powi(3) * delta * omega * omega);
        let rate = four_level_kerr_rate(delta, omega).unwrap();
        worst(&mut chi, rel(chi3_from_kerr(rate, mu12, mu34, n_d), closed));
        worst(
            &mut chi,
            rel(chi3_four_level(n_d, mu12, mu34, delta, omega), closed),
        );
        // the ensemble rate per emitter gives the same susceptibility
        let p = FourLevelParams {
            delta: delta / omega,
            omega: 1.0,
            lambda: 1.0,
            nu: 1.0,
            gamma1: 0.0,
            gamma3: 0.0,
        };
        let (s, d) = four_level(p);
        let sys = coupled_system(&s, &d, Regime::Rwa).unwrap();
        let e = ensemble_expansion(&collective_matrix(&sys, 5).unwrap(), 4).unwrap();
        let per = e
            .eigenvalue(&idx(&[2, 2]))
            .unwrap()
            .coeff_of(&[(1, 1), (1, 1)])
            .re
            / (5.0 * omega.powi(3));
        worst(&mut chi, rel(chi3_from_kerr(per, mu12, mu34, n_d), closed));
    }
    ok &= chi < 1e-12;

    let (x, field) = (3e-18, 2.5e4);
    ok &= rel(
        refractive_index(x, field),
        (1.0 + x * field * field / EPSILON_0).sqrt(),
    ) < 1e-15;
    ok &= rel(field_from_intensity(intensity(field)), field) < 1e-15;
    Outcome::new(
        ok,
        format!("Ω = g√n_p exact; χ³ from the Kerr rate vs closed form {chi:.1e}; n_r formula"),
    )
}

// -----------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("four-level closed forms", four_level_closed_forms),
        ("two-level Catalan coefficients", two_level_catalan),
        (
            "two-level and four-level ensemble formulas",
            ensemble_formulas,
        ),
        ("ensemble scaling identity", scaling_identity),
        ("fitted effective operator", polar_fit),
        ("truncation error vs ensemble size", nscaling),
        ("bare ensemble ground manifold", collective_bare_manifold),
        ("closed-form eigenvector coefficients", eigenvector_forms),
        ("collective matrix elements", collective_rules),
        ("coupling bounds and Kerr scaling", bounds_and_kerr),
        ("semiclassical limit", semiclassical),
        ("unit conversions", unit_conversions),
    ];
    let results: Vec<Option<Outcome>> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(*f)).collect();
        handles.into_iter().map(|h| h.join().ok()).collect()
    });
    let mut unexpected = 0;
    for (k, ((name, _), res)) in criteria.iter().zip(results).enumerate() {
        let res = res.unwrap_or_else(|| Outcome::new(false, "panicked".into()));
        let tag = if res.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {name}: {}", k + 1, res.detail);
        if !res.pass {
            match res.known {
                Some(why) => println!("     known deviation: {why}"),
                None => unexpected += 1,
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    }
}
