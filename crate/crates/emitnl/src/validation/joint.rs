use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::ValidationError;
use crate::effective::product_form;
use crate::emitter::{CoupledSystem, Regime};
use crate::ensemble::CollectiveSystem;
use crate::ops::{
    eigendecompose, eigh, realize, DenseOperator, FockTruncation, ModePolynomial, OperatorMatrix,
};
use crate::tipt::{expand_levels, ExpansionSeries, MultiIndex, RecursionOptions};

/// Smallest admissible overlap between a tracked eigenvector and its
/// unperturbed reference.
pub const OVERLAP_THRESHOLD: f64 = 0.5;

/// Extra Fock levels required above the highest probed occupation.
pub const CUTOFF_BUFFER: usize = 4;

/// Emitter (or symmetric ensemble space) ⊗ truncated Fock space.
///
/// Energies are those of the expansion frame: detunings in the rotating
/// frame, transition frequencies for bare coupling. Free-field terms are
/// not included.
#[derive(Clone, Debug)]
pub struct JointModel {
    pub hamiltonian: DenseOperator,
    /// One label per emitter basis state.
    pub labels: Vec<String>,
    pub truncation: FockTruncation,
    pub regime: Regime,
    pub system: CoupledSystem,
}

impl JointModel {
    pub fn new(
        system: &CoupledSystem,
        truncation: FockTruncation,
    ) -> Result<Self, ValidationError> {
        let labels = (0..system.n_levels()).map(|l| l.to_string()).collect();
        Self::build(system.clone(), labels, truncation)
    }

    pub fn collective(
        c: &CollectiveSystem,
        truncation: FockTruncation,
    ) -> Result<Self, ValidationError> {
        let labels = c.basis.iter().map(ToString::to_string).collect();
        Self::build(c.system.clone(), labels, truncation)
    }

    fn build(
        system: CoupledSystem,
        labels: Vec<String>,
        truncation: FockTruncation,
    ) -> Result<Self, ValidationError> {
        let hamiltonian = system.joint_hamiltonian(&truncation)?;
        Ok(Self {
            hamiltonian,
            labels,
            truncation,
            regime: system.regime,
            system,
        })
    }

    pub fn emitter_dim(&self) -> usize {
        self.system.n_levels()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Same model with every Fock cutoff doubled.
    pub fn doubled(&self) -> Result<Self, ValidationError> {
        Self::build(
            self.system.clone(),
            self.labels.clone(),
            self.truncation.doubled(),
        )
    }
}

/// Unperturbed field state a ground-manifold eigenvalue is attached to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Probe {
    /// Fock occupations, one per mode.
    Fock(Vec<usize>),
    /// Quadrature eigenvalues `ξ_l` of `φ_l a_l + φ_l* a_l†`.
    Quadrature(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldEnergy {
    pub probe: Probe,
    pub energy: f64,
    /// Weight of the tracked eigenvector on its reference state.
    pub overlap: f64,
}

/// All occupation vectors with every entry in `0..=n_max`, last mode fastest.
fn occupation_grid(n_modes: usize, n_max: usize) -> Vec<Vec<usize>> {
    let t = FockTruncation::uniform(n_modes, n_max.max(1)).expect("cutoff at least 1");
    t.states()
        .filter(|o| o.iter().all(|&n| n <= n_max))
        .collect()
}

/// Eigenvalues of `a + a†` restricted to `|0⟩ … |n_max⟩`, ascending.
pub fn quadrature_nodes(n_max: usize) -> Vec<f64> {
    let t = FockTruncation::uniform(1, n_max.max(1)).expect("cutoff at least 1");
    let x = realize(&ModePolynomial::quadrature(1, 0), &t).expect("one mode");
    let mut values = eigendecompose(&x).expect("Hermitian").values;
    if n_max == 0 {
        values = vec![0.0];
    }
    values
}

/// Emitter matrix of a bare system with each mode's quadrature replaced by `xi[l]`.
pub fn classical_emitter_matrix(
    sys: &CoupledSystem,
    xi: &[f64],
) -> Result<DMatrix<C64>, ValidationError> {
    let n = sys.n_levels();
    let mut h = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        sys.energies.iter().map(|&e| C64::new(e, 0.0)),
    ));
    for (l, v) in sys.interactions.iter().enumerate() {
        let (_, w) = product_form(v, l)?;
        h += w.scale(sys.modes[l].rate * xi[l]);
    }
    Ok(h)
}

/// Eigenvalue of `h` whose eigenvector has the largest weight on `reference`.
fn tracked(
    h: &DMatrix<C64>,
    dims: Vec<usize>,
    reference: usize,
) -> Result<(f64, f64), ValidationError> {
    let e = eigendecompose(&DenseOperator::new(h.clone(), dims))?;
    let (col, w) = (0..e.values.len())
        .map(|c| (c, e.vectors[(reference, c)].norm_sqr()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(ValidationError::EmptyModel)?;
    if w < OVERLAP_THRESHOLD {
        return Err(ValidationError::NonPerturbative { overlap: w });
    }
    Ok((e.values[col], w))
}

/// Exact eigenvalues of the ground manifold, one per probe.
///
/// Rotating-frame models are probed with the product states `|0⟩|n⟩`,
/// every occupation up to `n_probe`, each tracked by maximal overlap.
/// Bare models commute with every field quadrature; they are probed at the
/// quadrature eigenvalues of the `0 … n_probe` Fock block, where each
/// manifold energy is the tracked eigenvalue of a c-number emitter matrix.
pub fn exact_ground_manifold(
    model: &JointModel,
    n_probe: usize,
) -> Result<Vec<ManifoldEnergy>, ValidationError> {
    let cutoff = model
        .truncation
        .cutoffs()
        .iter()
        .copied()
        .min()
        .unwrap_or(0);
    if model.truncation.n_modes() > 0 && cutoff < n_probe + CUTOFF_BUFFER {
        return Err(ValidationError::Cutoff {
            cutoff,
            needed: n_probe + CUTOFF_BUFFER,
        });
    }
    let n_modes = model.system.n_modes();
    match model.regime {
        Regime::Rwa => occupation_grid(n_modes, n_probe)
            .into_iter()
            .map(|occ| {
                let idx = model.truncation.index(&occ);
                let (energy, overlap) = tracked(
                    model.hamiltonian.matrix(),
                    model.hamiltonian.dims().to_vec(),
                    idx,
                )?;
                Ok(ManifoldEnergy {
                    probe: Probe::Fock(occ),
                    energy,
                    overlap,
                })
            })
            .collect(),
        Regime::Bare => {
            let nodes = quadrature_nodes(n_probe);
            occupation_grid(n_modes, n_probe)
                .into_iter()
                .map(|pick| {
                    let xi: Vec<f64> = pick.iter().map(|&k| nodes[k]).collect();
                    let h = classical_emitter_matrix(&model.system, &xi)?;
                    let (energy, overlap) = tracked(&h, vec![model.emitter_dim()], 0)?;
                    Ok(ManifoldEnergy {
                        probe: Probe::Quadrature(xi),
                        energy,
                        overlap,
                    })
                })
                .collect()
        }
    }
}

/// Largest relative change of any ground-manifold eigenvalue when every
/// Fock cutoff doubles.
pub fn cutoff_stability(model: &JointModel, n_probe: usize) -> Result<f64, ValidationError> {
    let a = exact_ground_manifold(model, n_probe)?;
    let b = exact_ground_manifold(&model.doubled()?, n_probe)?;
    let scale = a
        .iter()
        .map(|m| m.energy.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x.energy - y.energy).abs() / scale)
        .fold(0.0, f64::max))
}

/// Diagonal element `⟨n|p|n⟩` of a normal-ordered polynomial.
pub fn fock_expectation(p: &ModePolynomial, occ: &[usize]) -> f64 {
    p.terms()
        .filter(|(m, _)| m.powers().iter().all(|&(k, j)| k == j))
        .map(|(m, c)| {
            // ⟨n|a†ᵏaᵏ|n⟩ = n!/(n−k)!
            let w: f64 = m
                .powers()
                .iter()
                .zip(occ)
                .map(|(&(k, _), &n)| {
                    let k = k as usize;
                    if k > n {
                        0.0
                    } else {
                        (n - k + 1..=n).map(|x| x as f64).product()
                    }
                })
                .product();
            c.re * w
        })
        .sum()
}

/// Fourth-order prediction of the same manifold energies.
///
/// Bare probes are evaluated by expanding the c-number emitter matrix, which
/// is exact because every coupling is a function of a single quadrature.
pub fn tipt_ground_manifold(
    model: &JointModel,
    n_probe: usize,
    max_order: u32,
) -> Result<Vec<(Probe, f64)>, ValidationError> {
    let sys = &model.system;
    let n_modes = sys.n_modes();
    let rates = sys.rates();
    match model.regime {
        Regime::Rwa => {
            let series = expand_levels(
                &sys.energies,
                &sys.interactions,
                0,
                max_order,
                RecursionOptions::default(),
            )?;
            let e = series.resum_eigenvalue(&rates, max_order);
            Ok(occupation_grid(n_modes, n_probe)
                .into_iter()
                .map(|occ| {
                    let v = series.energy0 + fock_expectation(&e, &occ);
                    (Probe::Fock(occ), v)
                })
                .collect())
        }
        Regime::Bare => {
            let nodes = quadrature_nodes(n_probe);
            occupation_grid(n_modes, n_probe)
                .into_iter()
                .map(|pick| {
                    let xi: Vec<f64> = pick.iter().map(|&k| nodes[k]).collect();
                    let series = classical_series(sys, &xi, max_order)?;
                    let v = series.energy0 + series.resum_eigenvalue(&rates, max_order).scalar().re;
                    Ok((Probe::Quadrature(xi), v))
                })
                .collect()
        }
    }
}

/// Expansion of a bare system with each quadrature fixed at `xi[l]`.
pub fn classical_series(
    sys: &CoupledSystem,
    xi: &[f64],
    max_order: u32,
) -> Result<ExpansionSeries, ValidationError> {
    let n = sys.n_levels();
    let ints = sys
        .interactions
        .iter()
        .enumerate()
        .map(|(l, v)| {
            let (_, w) = product_form(v, l)?;
            let m = OperatorMatrix::from_fn(n, xi.len(), |i, j| {
                ModePolynomial::constant(xi.len(), w[(i, j)] * xi[l])
            })?;
            Ok(m)
        })
        .collect::<Result<Vec<_>, ValidationError>>()?;
    Ok(expand_levels(
        &sys.energies,
        &ints,
        0,
        max_order,
        RecursionOptions::default(),
    )?)
}

/// Effective operator of the ground manifold on the field space.
///
/// The manifold is spanned by the eigenvectors carrying most weight on the
/// emitter ground; the isometry onto it whose ground block is Hermitian and
/// positive is the unitary polar factor of that block.
pub fn effective_operator(model: &JointModel) -> Result<DMatrix<C64>, ValidationError> {
    let fd = model.truncation.dim();
    let e = eigendecompose(&model.hamiltonian)?;
    let weight = |c: usize| (0..fd).map(|k| e.vectors[(k, c)].norm_sqr()).sum::<f64>();
    let mut cols: Vec<(usize, f64)> = (0..e.values.len()).map(|c| (c, weight(c))).collect();
    cols.sort_by(|a, b| b.1.total_cmp(&a.1));
    cols.truncate(fd);
    if let Some(&(_, w)) = cols.last() {
        if w < OVERLAP_THRESHOLD {
            return Err(ValidationError::NonPerturbative { overlap: w });
        }
    }
    let b = DMatrix::from_fn(fd, fd, |k, i| e.vectors[(k, cols[i].0)]);
    // Q = B (B†B)^{-1/2}. The singular values of B cluster near one, where
    // the complex SVD has been seen to return inconsistent factors.
    let g = eigh(&(b.adjoint() * &b))?;
    let inv_sqrt =
        DVector::from_iterator(fd, g.values.iter().map(|&x| C64::new(1.0 / x.sqrt(), 0.0)));
    let q = &b * &g.vectors * DMatrix::from_diagonal(&inv_sqrt) * g.vectors.adjoint();
    let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
        fd,
        cols.iter().map(|&(c, _)| C64::new(e.values[c], 0.0)),
    ));
    Ok(&q * lambda * q.adjoint())
}

/// Taylor coefficients `0..=4` of the effective operator in a common coupling
/// scale, each as a matrix on the field states with occupations up to
/// `n_probe`.
///
/// Seven Chebyshev nodes on `[−s_max, s_max]` include zero; even and odd
/// parts are interpolated separately in `s²`, so the first neglected power
/// aliases into order four only as `s_max⁴`.
pub fn fitted_coefficients(
    sys: &CoupledSystem,
    truncation: &FockTruncation,
    s_max: f64,
    n_probe: usize,
) -> Result<Vec<DMatrix<C64>>, ValidationError> {
    let sweep = Sweep::new(sys, truncation, n_probe)?;
    sweep.fit(s_max)
}

/// [`fitted_coefficients`] with the sweep range chosen from the ladder
/// `s_ref · 2^(−k/2)`, `k = 0..=6`.
///
/// Aliasing falls as `s_max⁴` while eigenvalue roundoff grows as `s_max⁻⁴`, so
/// the two fits that agree best bracket the optimum; the wider of them is
/// returned together with its range.
pub fn fitted_coefficients_adaptive(
    sys: &CoupledSystem,
    truncation: &FockTruncation,
    s_ref: f64,
    n_probe: usize,
) -> Result<(f64, Vec<DMatrix<C64>>), ValidationError> {
    let sweep = Sweep::new(sys, truncation, n_probe)?;
    let ladder: Vec<f64> = (0..7)
        .map(|k| s_ref * 0.5f64.powf(k as f64 / 2.0))
        .collect();
    let fits = ladder
        .iter()
        .map(|&s| sweep.fit(s))
        .collect::<Result<Vec<_>, _>>()?;
    let spread = |a: &[DMatrix<C64>], b: &[DMatrix<C64>]| {
        let size = |m: &DMatrix<C64>| m.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let s2 = size(&a[2]);
        a.iter()
            .zip(b)
            .map(|(x, y)| size(&(x - y)) / size(x).max(s2))
            .fold(0.0, f64::max)
    };
    let best = (0..fits.len() - 1)
        .min_by(|&i, &j| spread(&fits[i], &fits[i + 1]).total_cmp(&spread(&fits[j], &fits[j + 1])))
        .unwrap_or(0);
    Ok((ladder[best], fits.into_iter().nth(best).unwrap_or_default()))
}

struct Sweep<'a> {
    sys: &'a CoupledSystem,
    truncation: &'a FockTruncation,
    keep: Vec<usize>,
    h0: DMatrix<C64>,
}

impl<'a> Sweep<'a> {
    fn new(
        sys: &'a CoupledSystem,
        truncation: &'a FockTruncation,
        n_probe: usize,
    ) -> Result<Self, ValidationError> {
        let keep = truncation
            .states()
            .enumerate()
            .filter(|(_, o)| o.iter().all(|&n| n <= n_probe))
            .map(|(i, _)| i)
            .collect();
        let mut sweep = Self {
            sys,
            truncation,
            keep,
            h0: DMatrix::zeros(0, 0),
        };
        sweep.h0 = sweep.at(0.0)?;
        Ok(sweep)
    }

    fn at(&self, s: f64) -> Result<DMatrix<C64>, ValidationError> {
        let scaled: Vec<f64> = self.sys.rates().iter().map(|r| r * s).collect();
        let m = JointModel::new(&self.sys.with_rates(&scaled), self.truncation.clone())?;
        let h = effective_operator(&m)?;
        let k = self.keep.len();
        Ok(DMatrix::from_fn(k, k, |i, j| {
            h[(self.keep[i], self.keep[j])]
        }))
    }

    fn fit(&self, s_max: f64) -> Result<Vec<DMatrix<C64>>, ValidationError> {
        let nodes: Vec<f64> = (0..7)
            .map(|k| s_max * ((2 * k + 1) as f64 * std::f64::consts::PI / 14.0).cos())
            .collect();
        let (keep, h0, at) = (&self.keep, &self.h0, |s| self.at(s));
        let pairs: Vec<(f64, DMatrix<C64>, DMatrix<C64>)> = nodes[..3]
            .iter()
            .map(|&s| Ok((s, at(s)?, at(-s)?)))
            .collect::<Result<_, ValidationError>>()?;
        let k = keep.len();
        // even: h0 + c2 s² + c4 s⁴ + c6 s⁶ ; odd: c1 + c3 s² + c5 s⁴ after dividing by s
        let even_v = DMatrix::from_fn(4, 4, |i, j| {
            if i == 0 {
                if j == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                pairs[i - 1].0.powi(2 * j as i32)
            }
        });
        let odd_v = DMatrix::from_fn(3, 3, |i, j| pairs[i].0.powi(2 * j as i32));
        let even_inv = even_v.try_inverse().ok_or(ValidationError::EmptyModel)?;
        let odd_inv = odd_v.try_inverse().ok_or(ValidationError::EmptyModel)?;
        let mut out = vec![DMatrix::<C64>::zeros(k, k); 5];
        for r in 0..k {
            for c in 0..k {
                let ev: Vec<C64> = std::iter::once(h0[(r, c)])
                    .chain(pairs.iter().map(|(_, p, m)| (p[(r, c)] + m[(r, c)]) * 0.5))
                    .collect();
                let od: Vec<C64> = pairs
                    .iter()
                    .map(|(s, p, m)| (p[(r, c)] - m[(r, c)]) / (2.0 * s))
                    .collect();
                for (slot, order) in [(0usize, 0usize), (1, 2), (2, 4)] {
                    out[order][(r, c)] = (0..4).map(|j| ev[j] * even_inv[(slot, j)]).sum();
                }
                for (slot, order) in [(0usize, 1usize), (1, 3)] {
                    out[order][(r, c)] = (0..3).map(|j| od[j] * odd_inv[(slot, j)]).sum();
                }
            }
        }
        Ok(out)
    }
}

/// Expansion coefficients `Σ_{|J|=K} rates^J Ê_J` for `K = 0..=4`, realized
/// on the same field states as [`fitted_coefficients`].
pub fn expansion_coefficients(
    sys: &CoupledSystem,
    truncation: &FockTruncation,
    n_probe: usize,
) -> Result<Vec<DMatrix<C64>>, ValidationError> {
    let series = expand_levels(
        &sys.energies,
        &sys.interactions,
        0,
        4,
        RecursionOptions::default(),
    )?;
    let rates = sys.rates();
    let keep: Vec<usize> = truncation
        .states()
        .enumerate()
        .filter(|(_, o)| o.iter().all(|&n| n <= n_probe))
        .map(|(i, _)| i)
        .collect();
    (0..=4u32)
        .map(|order| {
            let mut sum = ModePolynomial::zero(sys.n_modes());
            for j in MultiIndex::with_total(sys.n_modes(), order) {
                sum = sum + series.eigenvalue(&j)?.scale_re(j.weight(&rates));
            }
            let m = realize(&sum, truncation)?;
            Ok(DMatrix::from_fn(keep.len(), keep.len(), |i, j| {
                m.matrix()[(keep[i], keep[j])]
            }))
        })
        .collect()
}
