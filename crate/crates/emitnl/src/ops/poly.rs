//! Normal-ordered polynomials in bosonic creation and annihilation operators.
//!
//! Every monomial is stored per mode as a pair `(k, j)` meaning `a†^k a^j`,
//! with all creation operators to the left. Distinct modes commute, so the
//! per-mode pairs fully determine the operator.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::OpsError;

/// Relative threshold below which coefficients are dropped.
pub const DEFAULT_PRUNE: f64 = 1e-14;

/// Powers `(creation, annihilation)` for each mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn identity(n_modes: usize) -> Self {
        Self(vec![(0, 0); n_modes])
    }

    pub fn from_powers(powers: Vec<(u32, u32)>) -> Self {
        Self(powers)
    }

    pub fn powers(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.len()
    }

    pub fn creation(&self, mode: usize) -> u32 {
        self.0[mode].0
    }

    pub fn annihilation(&self, mode: usize) -> u32 {
        self.0[mode].1
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(k, j)| k + j).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&(k, j)| k == 0 && j == 0)
    }

    /// True when every mode has as many creation as annihilation operators.
    pub fn is_number_conserving(&self) -> bool {
        self.0.iter().all(|&(k, j)| k == j)
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.iter().map(|&(k, j)| (j, k)).collect())
    }

    /// Oscillation frequency `Σ_m (j_m − k_m) ω_m` in the interaction picture.
    pub fn frequency(&self, omega: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(omega)
            .map(|(&(k, j), w)| (j as f64 - k as f64) * w)
            .sum()
    }

    /// Modes on which the monomial acts nontrivially.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &(k, j))| k + j > 0)
            .map(|(m, _)| m)
            .collect()
    }
}

/// Accumulates terms and prunes relative to the largest summand pushed.
///
/// Pruning against the summand scale rather than the result makes exact
/// cancellations come out as the empty polynomial.
#[derive(Clone, Debug)]
pub struct PolySum {
    n_modes: usize,
    terms: BTreeMap<Monomial, C64>,
    scale: f64,
}

impl PolySum {
    pub fn new(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: BTreeMap::new(),
            scale: 0.0,
        }
    }

    pub fn push(&mut self, mono: Monomial, coef: C64) {
        debug_assert_eq!(mono.n_modes(), self.n_modes);
        self.scale = self.scale.max(coef.norm());
        *self.terms.entry(mono).or_insert(C64::new(0.0, 0.0)) += coef;
    }

    pub fn push_poly(&mut self, p: &ModePolynomial, factor: C64) {
        for (m, c) in &p.terms {
            self.push(m.clone(), c * factor);
        }
    }

    /// Adds `factor · p · q`.
    pub fn push_product(&mut self, p: &ModePolynomial, q: &ModePolynomial, factor: C64) {
        for (mp, cp) in &p.terms {
            for (mq, cq) in &q.terms {
                let c = cp * cq * factor;
                for (m, w) in wick_product(mp, mq) {
                    self.push(m, c * w);
                }
            }
        }
    }

    pub fn finish(self) -> ModePolynomial {
        self.finish_with(DEFAULT_PRUNE)
    }

    pub fn finish_with(self, rel: f64) -> ModePolynomial {
        let cut = rel * self.scale;
        let terms = self
            .terms
            .into_iter()
            .filter(|(_, c)| c.norm() > cut && *c != C64::new(0.0, 0.0))
            .collect();
        ModePolynomial {
            n_modes: self.n_modes,
            terms,
        }
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `(a†^k1 a^j1)(a†^k2 a^j2)` for a single mode, as `(k, j, weight)` terms.
fn wick_single(k1: u32, j1: u32, k2: u32, j2: u32) -> Vec<(u32, u32, f64)> {
    (0..=j1.min(k2))
        .map(|i| {
            let w = binom(j1, i) * binom(k2, i) * factorial(i);
            (k1 + k2 - i, j1 + j2 - i, w)
        })
        .collect()
}

/// Normal-ordered product of two monomials.
pub(crate) fn wick_product(p: &Monomial, q: &Monomial) -> Vec<(Monomial, f64)> {
    let mut acc: Vec<(Vec<(u32, u32)>, f64)> = vec![(Vec::with_capacity(p.n_modes()), 1.0)];
    for (&(k1, j1), &(k2, j2)) in p.0.iter().zip(&q.0) {
        let single = wick_single(k1, j1, k2, j2);
        if single.len() == 1 {
            let (k, j, w) = single[0];
            for (pw, c) in acc.iter_mut() {
                pw.push((k, j));
                *c *= w;
            }
            continue;
        }
        acc = acc
            .into_iter()
            .flat_map(|(pw, c)| {
                single.iter().map(move |&(k, j, w)| {
                    let mut next = pw.clone();
                    next.push((k, j));
                    (next, c * w)
                })
            })
            .collect();
    }
    acc.into_iter().map(|(pw, c)| (Monomial(pw), c)).collect()
}

/// Polynomial in the mode operators of a fixed number of modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModePolynomial {
    n_modes: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl ModePolynomial {
    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n_modes: usize) -> Self {
        Self::constant(n_modes, C64::new(1.0, 0.0))
    }

    pub fn constant(n_modes: usize, c: C64) -> Self {
        Self::monomial(Monomial::identity(n_modes), c)
    }

    pub fn monomial(mono: Monomial, c: C64) -> Self {
        let n_modes = mono.n_modes();
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert(mono, c);
        }
        Self { n_modes, terms }
    }

    /// `a_mode†`
    pub fn create(n_modes: usize, mode: usize) -> Self {
        let mut pw = vec![(0, 0); n_modes];
        pw[mode] = (1, 0);
        Self::monomial(Monomial(pw), C64::new(1.0, 0.0))
    }

    /// `a_mode`
    pub fn annihilate(n_modes: usize, mode: usize) -> Self {
        let mut pw = vec![(0, 0); n_modes];
        pw[mode] = (0, 1);
        Self::monomial(Monomial(pw), C64::new(1.0, 0.0))
    }

    /// `a_mode† a_mode`
    pub fn number(n_modes: usize, mode: usize) -> Self {
        let mut pw = vec![(0, 0); n_modes];
        pw[mode] = (1, 1);
        Self::monomial(Monomial(pw), C64::new(1.0, 0.0))
    }

    /// `a + a†` for one mode.
    pub fn quadrature(n_modes: usize, mode: usize) -> Self {
        Self::create(n_modes, mode) + Self::annihilate(n_modes, mode)
    }

    pub fn from_terms<I>(n_modes: usize, terms: I) -> Result<Self, OpsError>
    where
        I: IntoIterator<Item = (Monomial, C64)>,
    {
        let mut sum = PolySum::new(n_modes);
        for (m, c) in terms {
            if m.n_modes() != n_modes {
                return Err(OpsError::ModeMismatch {
                    left: n_modes,
                    right: m.n_modes(),
                });
            }
            sum.push(m, c);
        }
        Ok(sum.finish())
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> C64 {
        self.terms.get(mono).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Coefficient of the monomial given by its per-mode powers.
    pub fn coeff_of(&self, powers: &[(u32, u32)]) -> C64 {
        self.coeff(&Monomial(powers.to_vec()))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Scalar part, the coefficient of the identity.
    pub fn scalar(&self) -> C64 {
        self.coeff(&Monomial::identity(self.n_modes))
    }

    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(Monomial::is_identity)
    }

    /// Normal-ordered product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self, OpsError> {
        self.check_modes(other)?;
        let mut sum = PolySum::new(self.n_modes);
        sum.push_product(self, other, C64::new(1.0, 0.0));
        Ok(sum.finish())
    }

    pub fn dagger(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.dagger(), c.conj()))
            .collect();
        Self {
            n_modes: self.n_modes,
            terms,
        }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, OpsError> {
        self.check_modes(other)?;
        let mut sum = PolySum::new(self.n_modes);
        sum.push_product(self, other, C64::new(1.0, 0.0));
        sum.push_product(other, self, C64::new(-1.0, 0.0));
        Ok(sum.finish())
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut sum = PolySum::new(self.n_modes);
        sum.push_poly(self, c);
        sum.finish()
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, OpsError> {
        self.check_modes(other)?;
        let mut sum = PolySum::new(self.n_modes);
        sum.push_poly(self, C64::new(1.0, 0.0));
        sum.push_poly(other, C64::new(1.0, 0.0));
        Ok(sum.finish())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, OpsError> {
        self.check_modes(other)?;
        let mut sum = PolySum::new(self.n_modes);
        sum.push_poly(self, C64::new(1.0, 0.0));
        sum.push_poly(other, C64::new(-1.0, 0.0));
        Ok(sum.finish())
    }

    /// Drops terms below `rel` times the largest coefficient.
    pub fn pruned(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs();
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| c.norm() > cut)
            .map(|(m, c)| (m.clone(), *c))
            .collect();
        Self {
            n_modes: self.n_modes,
            terms,
        }
    }

    /// Keeps only the monomials for which `keep` returns true.
    pub fn filter<F: Fn(&Monomial, &C64) -> bool>(&self, keep: F) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, c)| keep(m, c))
            .map(|(m, c)| (m.clone(), *c))
            .collect();
        Self {
            n_modes: self.n_modes,
            terms,
        }
    }

    /// Largest coefficient magnitude of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut sum = PolySum::new(self.n_modes);
        sum.push_poly(self, C64::new(1.0, 0.0));
        sum.push_poly(&self.dagger(), C64::new(-1.0, 0.0));
        sum.finish_with(0.0).max_abs()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Largest coefficient difference against `other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut sum = PolySum::new(self.n_modes);
        sum.push_poly(self, C64::new(1.0, 0.0));
        sum.push_poly(other, C64::new(-1.0, 0.0));
        sum.finish_with(0.0).max_abs()
    }

    /// Relative coefficient difference, measured against the larger operand.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            0.0
        } else {
            self.max_diff(other) / scale
        }
    }

    /// Expresses the number-conserving part in powers of `n_m = a_m† a_m`.
    ///
    /// Keys are per-mode exponents of `n_m`.
    pub fn number_form(&self) -> BTreeMap<Vec<u32>, C64> {
        let mut out: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (mono, c) in self.terms.iter().filter(|(m, _)| m.is_number_conserving()) {
            let mut acc: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
            for &(k, _) in mono.powers() {
                let s = stirling_first_signed(k);
                acc = acc
                    .into_iter()
                    .flat_map(|(pw, w)| {
                        s.iter()
                            .enumerate()
                            .filter(|(_, &x)| x != 0.0)
                            .map(move |(p, &x)| {
                                let mut next = pw.clone();
                                next.push(p as u32);
                                (next, w * x)
                            })
                    })
                    .collect();
            }
            for (pw, w) in acc {
                *out.entry(pw).or_insert(C64::new(0.0, 0.0)) += c * w;
            }
        }
        let scale = out.values().map(|c| c.norm()).fold(0.0, f64::max);
        out.retain(|_, c| c.norm() > DEFAULT_PRUNE * scale);
        out
    }

    /// `⟨n|p|n⟩` for a Fock state with the given occupations.
    pub fn diagonal_element(&self, occupations: &[usize]) -> C64 {
        self.terms
            .iter()
            .filter(|(m, _)| m.is_number_conserving())
            .map(|(m, c)| {
                let w: f64 = m
                    .powers()
                    .iter()
                    .zip(occupations)
                    .map(|(&(k, _), &n)| falling(n, k))
                    .product();
                c * w
            })
            .sum()
    }

    /// Drops every monomial of total degree above `max_degree`.
    pub fn truncate_degree(&self, max_degree: u32) -> Self {
        self.filter(|m, _| m.degree() <= max_degree)
    }

    fn check_modes(&self, other: &Self) -> Result<(), OpsError> {
        if self.n_modes != other.n_modes {
            return Err(OpsError::ModeMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        Ok(())
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay {
            poly: self,
            names: Some(names),
        }
    }
}

/// `n (n−1) ⋯ (n−k+1)`
pub(crate) fn falling(n: usize, k: u32) -> f64 {
    (0..k as usize).map(|i| n as f64 - i as f64).product()
}

/// Signed Stirling numbers of the first kind `s(k, p)` for `p = 0..=k`.
fn stirling_first_signed(k: u32) -> Vec<f64> {
    // falling factorial x(x-1)...(x-k+1) expanded in powers of x
    let mut c = vec![1.0];
    for i in 0..k {
        let mut next = vec![0.0; c.len() + 1];
        for (p, &v) in c.iter().enumerate() {
            next[p + 1] += v;
            next[p] -= i as f64 * v;
        }
        c = next;
    }
    c
}

impl Add for ModePolynomial {
    type Output = ModePolynomial;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("mode count mismatch")
    }
}

impl Sub for ModePolynomial {
    type Output = ModePolynomial;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("mode count mismatch")
    }
}

impl AddAssign<&ModePolynomial> for ModePolynomial {
    fn add_assign(&mut self, rhs: &ModePolynomial) {
        *self = self.checked_add(rhs).expect("mode count mismatch");
    }
}

impl Neg for ModePolynomial {
    type Output = ModePolynomial;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl Mul for &ModePolynomial {
    type Output = ModePolynomial;
    fn mul(self, rhs: Self) -> ModePolynomial {
        self.multiply(rhs).expect("mode count mismatch")
    }
}

impl Mul for ModePolynomial {
    type Output = ModePolynomial;
    fn mul(self, rhs: Self) -> ModePolynomial {
        &self * &rhs
    }
}

impl Mul<C64> for ModePolynomial {
    type Output = ModePolynomial;
    fn mul(self, rhs: C64) -> ModePolynomial {
        self.scale(rhs)
    }
}

impl Mul<f64> for ModePolynomial {
    type Output = ModePolynomial;
    fn mul(self, rhs: f64) -> ModePolynomial {
        self.scale_re(rhs)
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a ModePolynomial,
    names: Option<&'a [String]>,
}

pub(crate) fn default_mode_name(m: usize) -> String {
    const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
    NAMES
        .get(m)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("a{m}"))
}

pub(crate) fn fmt_complex(c: C64) -> String {
    if c.im == 0.0 {
        format!("{:.6e}", c.re)
    } else if c.re == 0.0 {
        format!("{:.6e}i", c.im)
    } else {
        format!("({:.6e}{:+.6e}i)", c.re, c.im)
    }
}

pub(crate) fn fmt_monomial(m: &Monomial, names: Option<&[String]>) -> String {
    let mut s = String::new();
    for (i, &(k, j)) in m.powers().iter().enumerate() {
        let name = names
            .and_then(|n| n.get(i).cloned())
            .unwrap_or_else(|| default_mode_name(i));
        if k > 0 {
            s.push_str(&name);
            s.push('†');
            if k > 1 {
                s.push_str(&format!("^{k}"));
            }
        }
        if j > 0 {
            s.push_str(&name);
            if j > 1 {
                s.push_str(&format!("^{j}"));
            }
        }
    }
    if s.is_empty() {
        s.push('1');
    }
    s
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .poly
            .terms
            .iter()
            .map(|(m, c)| format!("{} {}", fmt_complex(*c), fmt_monomial(m, self.names)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Display for ModePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        PolyDisplay {
            poly: self,
            names: None,
        }
        .fmt(f)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    powers: Vec<(u32, u32)>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n_modes: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for ModePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            n_modes: self.n_modes,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRepr {
                    powers: m.0.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModePolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for t in repr.terms {
            if t.powers.len() != repr.n_modes {
                return Err(serde::de::Error::custom(format!(
                    "monomial has {} modes, polynomial declares {}",
                    t.powers.len(),
                    repr.n_modes
                )));
            }
            terms.insert(Monomial(t.powers), C64::new(t.re, t.im));
        }
        Ok(Self {
            n_modes: repr.n_modes,
            terms,
        })
    }
}
