use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{DenseOperator, ModePolynomial, OpsError};

/// Per-mode cutoffs; mode `m` keeps `|0⟩ … |n_max[m]⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockTruncation(Vec<usize>);

impl FockTruncation {
    pub fn new(cutoffs: Vec<usize>) -> Result<Self, OpsError> {
        if let Some(m) = cutoffs.iter().position(|&n| n < 1) {
            return Err(OpsError::BadCutoff { mode: m });
        }
        Ok(Self(cutoffs))
    }

    pub fn uniform(n_modes: usize, n_max: usize) -> Result<Self, OpsError> {
        Self::new(vec![n_max; n_modes])
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.0.iter().map(|n| n + 1).collect()
    }

    pub fn dim(&self) -> usize {
        self.0.iter().map(|n| n + 1).product()
    }

    /// Flat index of an occupation vector; mode 0 is the most significant digit.
    pub fn index(&self, occ: &[usize]) -> usize {
        occ.iter()
            .zip(&self.0)
            .fold(0, |acc, (&n, &nmax)| acc * (nmax + 1) + n)
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.0.len()];
        for (m, &nmax) in self.0.iter().enumerate().rev() {
            occ[m] = index % (nmax + 1);
            index /= nmax + 1;
        }
        occ
    }

    pub fn states(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.dim()).map(|i| self.occupations(i))
    }

    /// Doubles every cutoff.
    pub fn doubled(&self) -> Self {
        Self(self.0.iter().map(|n| 2 * n).collect())
    }
}

/// Matrix of `p` on the truncated Fock space. Matrix elements that would
/// leave the truncated space are dropped.
pub fn realize(p: &ModePolynomial, t: &FockTruncation) -> Result<DenseOperator, OpsError> {
    if p.n_modes() != t.n_modes() {
        return Err(OpsError::ModeMismatch {
            left: p.n_modes(),
            right: t.n_modes(),
        });
    }
    let dim = t.dim();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for col in 0..dim {
        let occ = t.occupations(col);
        'terms: for (mono, c) in p.terms() {
            let mut out = occ.clone();
            let mut amp = 1.0;
            for (mode, &(k, j)) in mono.powers().iter().enumerate() {
                let n = out[mode];
                if (j as usize) > n {
                    continue 'terms;
                }
                let mid = n - j as usize;
                let top = mid + k as usize;
                if top > t.cutoffs()[mode] {
                    continue 'terms;
                }
                // a^j |n⟩ then a†^k |n-j⟩
                let down: f64 = (mid + 1..=n).map(|x| x as f64).product();
                let up: f64 = (mid + 1..=top).map(|x| x as f64).product();
                amp *= (down * up).sqrt();
                out[mode] = top;
            }
            m[(t.index(&out), col)] += c * amp;
        }
    }
    Ok(DenseOperator::new(m, t.dims()))
}
