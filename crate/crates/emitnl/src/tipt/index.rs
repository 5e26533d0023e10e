use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponents of the expansion parameters, one per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        Self(exps)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `self − e_i`, if component `i` is positive.
    pub fn minus_unit(&self, i: usize) -> Option<Self> {
        (self.0[i] > 0).then(|| {
            let mut v = self.0.clone();
            v[i] -= 1;
            Self(v)
        })
    }

    /// Componentwise difference; caller guarantees `q ≤ self`.
    pub fn minus(&self, q: &Self) -> Self {
        Self(self.0.iter().zip(&q.0).map(|(a, b)| a - b).collect())
    }

    /// All `Q` with `0 ≤ Q ≤ self` componentwise, excluding `0` and `self`.
    pub fn interior(&self) -> Vec<Self> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for &e in &self.0 {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..=e).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(Self)
            .filter(|q| !q.is_zero() && q != self)
            .collect()
    }

    /// Symbol sequence with mode `i` repeated `exponent_i` times.
    pub fn symbols(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
            .collect()
    }

    /// Product of `rates_i^exponent_i`.
    pub fn weight(&self, rates: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(rates)
            .map(|(&e, r)| r.powi(e as i32))
            .product()
    }

    /// Every index over `n` modes with total order at most `max`, ordered by
    /// total order and then lexicographically (descending in the first slot).
    pub fn enumerate(n: usize, max: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for t in 0..=max {
            out.extend(Self::with_total(n, t));
        }
        out
    }

    /// Every index over `n` modes with total exactly `t`.
    pub fn with_total(n: usize, t: u32) -> Vec<Self> {
        if n == 0 {
            return if t == 0 { vec![Self(vec![])] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in (0..=t).rev() {
            for rest in Self::with_total(n - 1, t - first) {
                let mut v = vec![first];
                v.extend(rest.0);
                out.push(Self(v));
            }
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}
