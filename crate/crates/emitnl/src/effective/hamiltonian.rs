use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::ops::{ModePolynomial, Monomial, PolySum};
use crate::tipt::ExpansionSeries;

/// `Σ_J rates^J Ê_J` over every computed order `≥ 1`.
pub fn assemble_hamiltonian(series: &ExpansionSeries, rates: &[f64]) -> ModePolynomial {
    series.resum_eigenvalue(rates, series.max_order)
}

/// `Σ_m ω_m a_m† a_m`.
pub fn free_field(omega: &[f64]) -> ModePolynomial {
    let mut sum = PolySum::new(omega.len());
    for (m, &w) in omega.iter().enumerate() {
        sum.push_poly(&ModePolynomial::number(omega.len(), m), C64::new(w, 0.0));
    }
    sum.finish()
}

/// Expansion indices contributing to one Hamiltonian monomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub powers: Vec<(u32, u32)>,
    pub sources: Vec<Vec<u32>>,
}

/// Which multi-indices produce each monomial of `hamiltonian`.
pub fn provenance(series: &ExpansionSeries, hamiltonian: &ModePolynomial) -> Vec<ProvenanceEntry> {
    let mut map: BTreeMap<&Monomial, Vec<Vec<u32>>> =
        hamiltonian.terms().map(|(m, _)| (m, Vec::new())).collect();
    for (j, e) in series.eigenvalue_terms() {
        if j.total() == 0 {
            continue;
        }
        for (m, _) in e.terms() {
            if let Some(v) = map.get_mut(m) {
                v.push(j.exponents().to_vec());
            }
        }
    }
    map.into_iter()
        .map(|(m, sources)| ProvenanceEntry {
            powers: m.powers().to_vec(),
            sources,
        })
        .collect()
}
