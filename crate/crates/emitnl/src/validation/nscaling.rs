//! Truncation error of the fourth-order ground-manifold energies of `N`
//! two-level emitters sharing one mode.
//!
//! Both the exact energies and the fourth-order sums are evaluated in
//! double-double arithmetic on the tridiagonal blocks of the symmetric
//! ladder, so the error curves stay meaningful down to relative errors far
//! below `f64` resolution.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ddouble::{refine_tridiagonal, DoubleDouble as DD};
use super::joint::quadrature_nodes;
use super::ValidationError;
use crate::emitter::Regime;

/// Largest ensemble the ladder oracle accepts.
pub const MAX_NSCALING_N: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NscalingOptions {
    /// Emitter detuning or transition frequency.
    pub delta: f64,
    /// Highest Fock occupation probed.
    pub n_probe: usize,
    /// Coupling values `λ`.
    pub grid: Vec<f64>,
}

impl NscalingOptions {
    /// 25 log-spaced points with `λ/Δ ∈ [0.01, 0.3]`.
    pub fn standard(delta: f64) -> Self {
        Self {
            delta,
            n_probe: 3,
            grid: log_grid(0.01 * delta, 0.3 * delta, 25),
        }
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPoint {
    /// Nominal coupling; the curve evaluates at `lambda · lambda_factor`.
    pub lambda: f64,
    /// Sum of squared relative errors over the probes; `None` where an
    /// evaluation failed.
    pub error: Option<f64>,
    /// Sum of absolute relative errors.
    pub abs_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub regime: Regime,
    pub n: usize,
    pub lambda_factor: f64,
    pub points: Vec<ErrorPoint>,
}

impl ErrorCurve {
    pub fn label(&self) -> String {
        if self.lambda_factor == 1.0 {
            format!("N={}", self.n)
        } else {
            format!("N={} λ×{:.4}", self.n, self.lambda_factor)
        }
    }
}

/// One tridiagonal block `diag + λ·off` with its ground reference at index 0.
struct Block {
    diag: Vec<DD>,
    off: Vec<DD>,
}

impl Block {
    fn scaled_off(&self, lambda: DD) -> Vec<DD> {
        self.off.iter().map(|&o| o * lambda).collect()
    }

    /// Exact eigenvalue continuously connected to index 0. Eigenvalues of an
    /// irreducible tridiagonal matrix never cross, so the connected one keeps
    /// the rank `diag[0]` has among the diagonal.
    fn exact(&self, lambda: f64) -> Result<DD, ValidationError> {
        let off = self.scaled_off(DD::from(lambda));
        let n = self.diag.len();
        let m = DMatrix::<f64>::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => self.diag[i].to_f64(),
            1 => off[i.min(j)].to_f64(),
            _ => 0.0,
        });
        let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        let rank = self
            .diag
            .iter()
            .filter(|d| d.to_f64() < self.diag[0].to_f64())
            .count();
        let guess = *values.get(rank).ok_or(ValidationError::EmptyModel)?;
        Ok(refine_tridiagonal(&self.diag, &off, guess))
    }

    /// Rayleigh–Schrödinger coefficients `E^0 … E^order` of the level at index 0.
    fn series(&self, order: usize) -> Vec<DD> {
        let n = self.diag.len();
        let apply = |c: &[DD]| -> Vec<DD> {
            (0..n)
                .map(|i| {
                    let mut s = DD::ZERO;
                    if i > 0 {
                        s = s + self.off[i - 1] * c[i - 1];
                    }
                    if i + 1 < n {
                        s = s + self.off[i] * c[i + 1];
                    }
                    s
                })
                .collect()
        };
        let mut c: Vec<Vec<DD>> = vec![(0..n)
            .map(|i| if i == 0 { DD::ONE } else { DD::ZERO })
            .collect()];
        let mut e = vec![self.diag[0]];
        for k in 1..=order {
            let vc = apply(&c[k - 1]);
            let mut norm = DD::ZERO;
            for q in 1..k {
                for m in 0..n {
                    norm = norm + c[q][m] * c[k - q][m];
                }
            }
            let mut ck = vec![DD::ZERO; n];
            ck[0] = -(norm * DD::from(0.5));
            let mut ek = vc[0];
            for q in 1..k {
                ek = ek - c[q][0] * e[k - q];
            }
            for m in 1..n {
                let mut num = vc[m];
                for q in 1..k {
                    num = num - c[q][m] * e[k - q];
                }
                ck[m] = num / (self.diag[0] - self.diag[m]);
            }
            e.push(ek);
            c.push(ck);
        }
        e
    }

    fn predicted(&self, lambda: f64, order: usize) -> DD {
        let l = DD::from(lambda);
        let mut pow = DD::ONE;
        let mut sum = DD::ZERO;
        for ek in self.series(order) {
            sum = sum + ek * pow;
            pow = pow * l;
        }
        sum
    }
}

fn sqrt_dd(x: f64) -> DD {
    DD::from(x).sqrt()
}

/// Blocks probed for `N` emitters: one per photon number `1..=n_probe` in
/// the rotating frame, one per quadrature node otherwise.
fn blocks(regime: Regime, n: usize, delta: f64, n_probe: usize) -> Vec<Block> {
    match regime {
        Regime::Rwa => (1..=n_probe)
            .map(|photons| {
                let top = photons.min(n);
                Block {
                    diag: (0..=top)
                        .map(|j| DD::from(j as f64) * DD::from(delta))
                        .collect(),
                    off: (0..top)
                        .map(|j| {
                            sqrt_dd(((n - j) * (j + 1)) as f64) * sqrt_dd((photons - j) as f64)
                        })
                        .collect(),
                }
            })
            .collect(),
        Regime::Bare => quadrature_nodes(n_probe)
            .into_iter()
            .filter(|xi| *xi != 0.0)
            .map(|xi| Block {
                diag: (0..=n)
                    .map(|j| DD::from(j as f64) * DD::from(delta))
                    .collect(),
                off: (0..n)
                    .map(|j| sqrt_dd(((n - j) * (j + 1)) as f64) * DD::from(xi))
                    .collect(),
            })
            .collect(),
    }
}

/// Error metrics at one coupling; probes whose exact energy vanishes
/// carry no relative error.
fn point(blocks: &[Block], lambda: f64) -> Result<(f64, f64), ValidationError> {
    let mut sq = DD::ZERO;
    let mut ab = DD::ZERO;
    for b in blocks {
        let exact = b.exact(lambda)?;
        if exact.hi() == 0.0 {
            continue;
        }
        let rel = (exact - b.predicted(lambda, 4)) / exact;
        sq = sq + rel * rel;
        ab = ab + rel.abs();
    }
    Ok((sq.to_f64(), ab.to_f64()))
}

fn curve(regime: Regime, n: usize, factor: f64, opts: &NscalingOptions) -> ErrorCurve {
    let bl = blocks(regime, n, opts.delta, opts.n_probe);
    let points = opts
        .grid
        .par_iter()
        .map(|&lambda| match point(&bl, lambda * factor) {
            Ok((e, a)) => ErrorPoint {
                lambda,
                error: Some(e),
                abs_error: Some(a),
            },
            Err(_) => ErrorPoint {
                lambda,
                error: None,
                abs_error: None,
            },
        })
        .collect();
    ErrorCurve {
        regime,
        n,
        lambda_factor: factor,
        points,
    }
}

/// Error curves for every `N`; in the rotating frame each `N > 1` also gets a
/// single-emitter companion evaluated at `λ N^{1/6}`.
pub fn nscaling_curves(
    regime: Regime,
    ns: &[usize],
    opts: &NscalingOptions,
) -> Result<Vec<ErrorCurve>, ValidationError> {
    if let Some(&n) = ns.iter().find(|&&n| !(1..=MAX_NSCALING_N).contains(&n)) {
        return Err(ValidationError::EnsembleSize {
            n,
            max: MAX_NSCALING_N,
        });
    }
    if opts.n_probe < 1 {
        return Err(ValidationError::NoProbes);
    }
    let mut jobs: Vec<(usize, f64)> = ns.iter().map(|&n| (n, 1.0)).collect();
    if regime == Regime::Rwa {
        jobs.extend(
            ns.iter()
                .filter(|&&n| n > 1)
                .map(|&n| (1, (n as f64).powf(1.0 / 6.0))),
        );
    }
    Ok(jobs
        .par_iter()
        .map(|&(n, f)| curve(regime, n, f, opts))
        .collect())
}

/// Exact ground-manifold energies of the ladder used by the curves, in
/// `f64`, for cross-checks against the dense oracle.
pub fn ladder_energies(
    regime: Regime,
    n: usize,
    delta: f64,
    n_probe: usize,
    lambda: f64,
) -> Result<Vec<f64>, ValidationError> {
    blocks(regime, n, delta, n_probe)
        .iter()
        .map(|b| Ok(b.exact(lambda)?.to_f64()))
        .collect()
}

/// Fourth-order ladder predictions matching [`ladder_energies`].
pub fn ladder_predictions(
    regime: Regime,
    n: usize,
    delta: f64,
    n_probe: usize,
    lambda: f64,
) -> Vec<f64> {
    blocks(regime, n, delta, n_probe)
        .iter()
        .map(|b| b.predicted(lambda, 4).to_f64())
        .collect()
}

/// CSV with columns `regime,N,lambda_factor,lambda,error,abs_error`.
pub fn curves_csv(curves: &[ErrorCurve]) -> String {
    let mut s = String::from("regime,N,lambda_factor,lambda,error,abs_error\n");
    let regime = |r: Regime| match r {
        Regime::Bare => "bare",
        Regime::Rwa => "rwa",
    };
    let num = |x: Option<f64>| x.map_or("nan".to_string(), |v| format!("{v:.17e}"));
    for c in curves {
        for p in &c.points {
            s.push_str(&format!(
                "{},{},{},{:.17e},{},{}\n",
                regime(c.regime),
                c.n,
                c.lambda_factor,
                p.lambda,
                num(p.error),
                num(p.abs_error)
            ));
        }
    }
    s
}
