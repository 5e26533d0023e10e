use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::EnsembleError;
use crate::emitter::{CoupledSystem, ModeInfo, Regime};
use crate::ops::{ModePolynomial, OperatorMatrix, PolySum};
use crate::tipt::{expand_levels, expand_recursive, ExpansionSeries, MultiIndex, RecursionOptions};

/// Highest order for which at most two excitations suffice.
pub const MAX_ENSEMBLE_ORDER: u32 = 4;

/// Symmetrized state with `occupations[j − 1]` emitters in excited level `j`
/// and the rest in the ground level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymmetricState {
    pub occupations: Vec<u32>,
}

impl SymmetricState {
    pub fn ground(n_excited: usize) -> Self {
        Self {
            occupations: vec![0; n_excited],
        }
    }

    pub fn excitation(&self) -> u32 {
        self.occupations.iter().sum()
    }

    /// Emitters in `level`, counting the ground as level 0.
    fn count(&self, level: usize, n: usize) -> u32 {
        if level == 0 {
            n as u32 - self.excitation()
        } else {
            self.occupations[level - 1]
        }
    }
}

impl fmt::Display for SymmetricState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .occupations
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, c)| format!("{c}_{}", j + 1))
            .collect();
        if parts.is_empty() {
            write!(f, "|0⟩")
        } else {
            write!(f, "|{}⟩", parts.join(","))
        }
    }
}

/// Symmetric states with at most `max_exc` excitations, by increasing
/// excitation and then decreasing occupation of the lowest excited level.
fn symmetric_basis(n_excited: usize, max_exc: u32) -> Vec<SymmetricState> {
    fn fill(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for c in (0..=left).rev() {
            cur[pos] = c;
            fill(pos + 1, left - c, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    for t in 0..=max_exc {
        let mut states = Vec::new();
        fill(0, t, &mut vec![0; n_excited], &mut states);
        out.extend(
            states
                .into_iter()
                .map(|occupations| SymmetricState { occupations }),
        );
    }
    out
}

/// Nonzero elements `⟨row|Σ_i |b⟩⟨a|_i|col⟩` of single-emitter transitions
/// `a → b` summed over emitters, as `(row, col, b, a, factor)`.
fn transitions(
    basis: &[SymmetricState],
    m: usize,
    n: usize,
) -> Vec<(usize, usize, usize, usize, f64)> {
    let index: std::collections::HashMap<&SymmetricState, usize> =
        basis.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out = Vec::new();
    for (col, t) in basis.iter().enumerate() {
        for a in 0..m {
            let na = t.count(a, n);
            if na == 0 {
                continue;
            }
            for b in 0..m {
                if a == b {
                    out.push((col, col, a, a, na as f64));
                    continue;
                }
                let mut s = t.clone();
                if a > 0 {
                    s.occupations[a - 1] -= 1;
                }
                if b > 0 {
                    s.occupations[b - 1] += 1;
                }
                if let Some(&row) = index.get(&s) {
                    let nb = t.count(b, n);
                    out.push((row, col, b, a, (na as f64 * (nb as f64 + 1.0)).sqrt()));
                }
            }
        }
    }
    out
}

/// `N` emitters in their symmetric subspace, as a coupled system whose
/// levels are the symmetric states.
#[derive(Clone, Debug)]
pub struct CollectiveSystem {
    pub n: usize,
    pub basis: Vec<SymmetricState>,
    pub system: CoupledSystem,
    /// Whether the basis holds every symmetric state.
    pub complete: bool,
}

impl CollectiveSystem {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, s: &SymmetricState) -> Option<usize> {
        self.basis.iter().position(|b| b == s)
    }
}

fn build(
    sys: &CoupledSystem,
    n: usize,
    max_exc: Option<u32>,
) -> Result<CollectiveSystem, EnsembleError> {
    if n < 1 {
        return Err(EnsembleError::EmptyEnsemble(n));
    }
    let m = sys.n_levels();
    let cap = max_exc.map_or(n as u32, |c| c.min(n as u32));
    let basis = symmetric_basis(m - 1, cap);
    let dim = basis.len();
    let energies: Vec<f64> = basis
        .iter()
        .map(|s| (0..m).map(|l| s.count(l, n) as f64 * sys.energies[l]).sum())
        .collect();
    let moves = transitions(&basis, m, n);
    let fmodes = sys.interactions.first().map(|v| v.n_modes()).unwrap_or(0);
    let interactions = sys
        .interactions
        .iter()
        .map(|v| {
            let mut sums: Vec<PolySum> = (0..dim * dim).map(|_| PolySum::new(fmodes)).collect();
            for &(row, col, b, a, w) in &moves {
                sums[row * dim + col].push_poly(v.get(b, a), C64::new(w, 0.0));
            }
            let mut it = sums.into_iter();
            OperatorMatrix::from_fn(dim, fmodes, |_, _| {
                it.next().expect("one sum per element").finish()
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(crate::emitter::EmitterError::from)?;
    let system = CoupledSystem::from_parts(energies, sys.modes.clone(), interactions, sys.regime)?;
    Ok(CollectiveSystem {
        n,
        basis,
        system,
        complete: cap == n as u32,
    })
}

/// Collective interaction over the symmetric states with at most two
/// excitations, e.g. `⟨1_j|𝒱|0⟩ = √N V_j0` and
/// `⟨1_k,1_j|𝒱|1_j⟩ = √(N−1) V_k0`.
pub fn collective_matrix(sys: &CoupledSystem, n: usize) -> Result<CollectiveSystem, EnsembleError> {
    if let Some(mode) = sys.interactions.iter().position(|v| !v.has_zero_diagonal()) {
        return Err(EnsembleError::NonzeroDiagonal { mode });
    }
    build(sys, n, Some(2))
}

/// Symmetric subspace with every excitation number.
pub fn symmetric_operator(
    sys: &CoupledSystem,
    n: usize,
) -> Result<CollectiveSystem, EnsembleError> {
    build(sys, n, None)
}

/// Full `(N+1)`-state ladder of `N` two-level emitters with gap `gap`.
pub fn tls_ladder(
    n: usize,
    gap: f64,
    mode: ModeInfo,
    regime: Regime,
) -> Result<CollectiveSystem, EnsembleError> {
    let mut v = OperatorMatrix::zeros(2, 1);
    let (up, down) = match regime {
        Regime::Rwa => (
            ModePolynomial::annihilate(1, 0),
            ModePolynomial::create(1, 0),
        ),
        Regime::Bare => (
            ModePolynomial::quadrature(1, 0),
            ModePolynomial::quadrature(1, 0),
        ),
    };
    v.set(1, 0, up);
    v.set(0, 1, down);
    let single = CoupledSystem::from_parts(vec![0.0, gap], vec![mode], vec![v], regime)?;
    symmetric_operator(&single, n)
}

/// Ground-state expansion of the ensemble.
pub fn ensemble_expansion(
    c: &CollectiveSystem,
    max_order: u32,
) -> Result<ExpansionSeries, EnsembleError> {
    if !c.complete && max_order > MAX_ENSEMBLE_ORDER {
        return Err(EnsembleError::OrderTooHigh {
            requested: max_order,
            max: MAX_ENSEMBLE_ORDER,
        });
    }
    Ok(expand_levels(
        &c.system.energies,
        &c.system.interactions,
        0,
        max_order,
        RecursionOptions::default(),
    )?)
}

/// Fourth-order ensemble coefficient against `N` single-emitter copies.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingCheck {
    /// `𝔼₄`
    pub collective: ModePolynomial,
    /// `Ê₄`
    pub single: ModePolynomial,
    /// `𝔼₄ − N Ê₄`
    pub difference: ModePolynomial,
    /// `N(N−1) Σ_jk V_0j [V_0k, V_j0] V_k0 / (Δ_j² Δ_k)`, `Δ_j = E_0 − E_j`
    pub correction: ModePolynomial,
    /// `difference − correction`
    pub residual: ModePolynomial,
}

/// The correction accounts for the whole difference when every ground
/// coupling is a multiple of one operator, `V_j0 = g_j O`; excited-excited
/// couplings are unrestricted.
pub fn scaling_identity_check(
    sys: &CoupledSystem,
    n: usize,
) -> Result<ScalingCheck, EnsembleError> {
    if sys.n_modes() != 1 {
        return Err(EnsembleError::SingleModeOnly("the scaling identity"));
    }
    let four = MultiIndex::new(vec![4]);
    let c = collective_matrix(sys, n)?;
    let collective = ensemble_expansion(&c, 4)?.eigenvalue(&four)?.clone();
    let single = expand_recursive(sys, 0, 4)?.eigenvalue(&four)?.clone();
    let fmodes = single.n_modes();
    let v = &sys.interactions[0];
    let d: Vec<f64> = sys.energies.iter().map(|e| sys.energies[0] - e).collect();
    let mut sum = PolySum::new(fmodes);
    let nn = (n * (n - 1)) as f64;
    for j in 1..sys.n_levels() {
        for k in 1..sys.n_levels() {
            let comm = v.get(0, k).commutator(v.get(j, 0)).expect("same modes");
            if comm.is_zero() {
                continue;
            }
            let inner = v.get(0, j) * &comm;
            sum.push_product(
                &inner,
                v.get(k, 0),
                C64::new(nn / (d[j] * d[j] * d[k]), 0.0),
            );
        }
    }
    let correction = sum.finish();
    let mut diff = PolySum::new(fmodes);
    diff.push_poly(&collective, C64::new(1.0, 0.0));
    diff.push_poly(&single, C64::new(-(n as f64), 0.0));
    let difference = diff.finish();
    let mut res = PolySum::new(fmodes);
    res.push_poly(&collective, C64::new(1.0, 0.0));
    res.push_poly(&single, C64::new(-(n as f64), 0.0));
    res.push_poly(&correction, C64::new(-1.0, 0.0));
    let residual = res.finish_with(1e-12);
    Ok(ScalingCheck {
        collective,
        single,
        difference,
        correction,
        residual,
    })
}

/// Matrix of `Σ_i A^{(i)}` on the full symmetric space of `n` copies of a
/// `m`-level system, ordered as the states returned alongside it.
pub fn symmetric_matrix(single: &DMatrix<C64>, n: usize) -> (Vec<SymmetricState>, DMatrix<C64>) {
    let m = single.nrows();
    let basis = symmetric_basis(m - 1, n as u32);
    let dim = basis.len();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for (row, col, b, a, w) in transitions(&basis, m, n) {
        out[(row, col)] += single[(b, a)] * w;
    }
    (basis, out)
}
