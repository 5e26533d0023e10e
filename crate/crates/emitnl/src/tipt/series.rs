use std::collections::HashMap;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{MultiIndex, TiptError};
use crate::ops::{ModePolynomial, PolySum};

/// Eigenvalue and eigenvector expansion coefficients for one level.
#[derive(Clone, Debug)]
pub struct ExpansionSeries {
    pub target: usize,
    pub n_levels: usize,
    pub n_modes: usize,
    pub max_order: u32,
    pub energy0: f64,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    eigenvalue: Vec<ModePolynomial>,
    /// `[index][level]`
    eigenvector: Vec<Vec<ModePolynomial>>,
    /// Amplitudes on levels degenerate with the target, with their gap.
    undetermined: Vec<(MultiIndex, usize, f64)>,
}

impl ExpansionSeries {
    pub(crate) fn new(
        target: usize,
        n_levels: usize,
        n_modes: usize,
        max_order: u32,
        energy0: f64,
    ) -> Self {
        Self {
            target,
            n_levels,
            n_modes,
            max_order,
            energy0,
            indices: Vec::new(),
            lookup: HashMap::new(),
            eigenvalue: Vec::new(),
            eigenvector: Vec::new(),
            undetermined: Vec::new(),
        }
    }

    pub(crate) fn mark_undetermined(&mut self, j: MultiIndex, level: usize, gap: f64) {
        self.undetermined.push((j, level, gap));
    }

    /// Whether every eigenvector coefficient is defined.
    pub fn eigenvector_complete(&self) -> bool {
        self.undetermined.is_empty()
    }

    pub(crate) fn insert(&mut self, j: MultiIndex, e: ModePolynomial, c: Vec<ModePolynomial>) {
        self.lookup.insert(j.clone(), self.indices.len());
        self.indices.push(j);
        self.eigenvalue.push(e);
        self.eigenvector.push(c);
    }

    pub(crate) fn slot(&self, j: &MultiIndex) -> Option<usize> {
        self.lookup.get(j).copied()
    }

    pub(crate) fn c_at(&self, slot: usize, m: usize) -> &ModePolynomial {
        &self.eigenvector[slot][m]
    }

    pub(crate) fn e_at(&self, slot: usize) -> &ModePolynomial {
        &self.eigenvalue[slot]
    }

    /// Indices in computation order.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn eigenvalue(&self, j: &MultiIndex) -> Result<&ModePolynomial, TiptError> {
        self.slot(j)
            .map(|s| &self.eigenvalue[s])
            .ok_or_else(|| TiptError::NotComputed {
                index: j.to_string(),
            })
    }

    /// `⟨m₀|n_J⟩`
    pub fn eigenvector_coefficient(
        &self,
        m: usize,
        j: &MultiIndex,
    ) -> Result<&ModePolynomial, TiptError> {
        if m >= self.n_levels {
            return Err(TiptError::LevelOutOfRange {
                level: m,
                n_levels: self.n_levels,
            });
        }
        if let Some(&(_, level, gap)) = self.undetermined.iter().find(|(u, l, _)| u == j && *l == m)
        {
            return Err(TiptError::DegenerateGap { level, gap });
        }
        self.slot(j)
            .map(|s| &self.eigenvector[s][m])
            .ok_or_else(|| TiptError::NotComputed {
                index: j.to_string(),
            })
    }

    /// Eigenvalue coefficients paired with their indices.
    pub fn eigenvalue_terms(&self) -> impl Iterator<Item = (&MultiIndex, &ModePolynomial)> {
        self.indices.iter().zip(&self.eigenvalue)
    }

    /// `Σ_J rates^J Ê_J` over orders `1..=max_order`, without the constant
    /// unperturbed energy.
    pub fn resum_eigenvalue(&self, rates: &[f64], max_order: u32) -> ModePolynomial {
        let mut sum = PolySum::new(self.n_modes);
        for (j, e) in self.eigenvalue_terms() {
            let t = j.total();
            if t >= 1 && t <= max_order {
                sum.push_poly(e, C64::new(j.weight(rates), 0.0));
            }
        }
        sum.finish()
    }

    /// `Σ_J rates^J ⟨m₀|n_J⟩` over orders `0..=max_order`.
    pub fn resum_eigenvector(
        &self,
        m: usize,
        rates: &[f64],
        max_order: u32,
    ) -> Result<ModePolynomial, TiptError> {
        let mut sum = PolySum::new(self.n_modes);
        for j in self.indices.iter().filter(|j| j.total() <= max_order) {
            sum.push_poly(
                self.eigenvector_coefficient(m, j)?,
                C64::new(j.weight(rates), 0.0),
            );
        }
        Ok(sum.finish())
    }

    pub fn to_report(&self) -> SeriesReport {
        SeriesReport {
            target: self.target,
            energy0: self.energy0,
            max_order: self.max_order,
            eigenvalue: self
                .eigenvalue_terms()
                .map(|(j, e)| (j.exponents().to_vec(), e.clone()))
                .collect(),
        }
    }
}

/// Serializable view of the eigenvalue coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub target: usize,
    pub energy0: f64,
    pub max_order: u32,
    pub eigenvalue: Vec<(Vec<u32>, ModePolynomial)>,
}
