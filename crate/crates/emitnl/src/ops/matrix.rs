use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{DenseOperator, FockTruncation, ModePolynomial, OpsError, PolySum};

/// Square matrix over emitter levels whose entries are mode polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    n_modes: usize,
    entries: Vec<ModePolynomial>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize, n_modes: usize) -> Self {
        Self {
            dim,
            n_modes,
            entries: vec![ModePolynomial::zero(n_modes); dim * dim],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> ModePolynomial>(
        dim: usize,
        n_modes: usize,
        mut f: F,
    ) -> Result<Self, OpsError> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let p = f(i, j);
                if p.n_modes() != n_modes {
                    return Err(OpsError::ModeMismatch {
                        left: n_modes,
                        right: p.n_modes(),
                    });
                }
                entries.push(p);
            }
        }
        Ok(Self {
            dim,
            n_modes,
            entries,
        })
    }

    /// Scalar emitter matrix `w` tensored with a single field operator.
    pub fn product(w: &DMatrix<C64>, op: &ModePolynomial) -> Self {
        let dim = w.nrows();
        Self::from_fn(dim, op.n_modes(), |i, j| {
            if w[(i, j)] == C64::new(0.0, 0.0) {
                ModePolynomial::zero(op.n_modes())
            } else {
                op.scale(w[(i, j)])
            }
        })
        .expect("single operator has consistent modes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn get(&self, i: usize, j: usize) -> &ModePolynomial {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: ModePolynomial) {
        assert_eq!(p.n_modes(), self.n_modes);
        self.entries[i * self.dim + j] = p;
    }

    /// Largest coefficient among the entries.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(ModePolynomial::max_abs)
            .fold(0.0, f64::max)
    }

    /// Largest defect of `entry(j,k)† = entry(k,j)`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max(self.get(i, j).dagger().max_diff(self.get(j, i)));
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.dim).all(|i| self.get(i, i).is_zero())
    }

    /// `Σ_jk (u†)_{aj} M_{jk} u_{kb}`, a change of emitter basis.
    pub fn conjugate(&self, u: &DMatrix<C64>) -> Self {
        let ud = u.adjoint();
        let mut out = Self::zeros(self.dim, self.n_modes);
        for a in 0..self.dim {
            for b in 0..self.dim {
                let mut sum = PolySum::new(self.n_modes);
                for j in 0..self.dim {
                    for k in 0..self.dim {
                        let w = ud[(a, j)] * u[(k, b)];
                        if w.norm() > 0.0 {
                            sum.push_poly(self.get(j, k), w);
                        }
                    }
                }
                out.set(a, b, sum.finish_with(1e-13));
            }
        }
        out
    }

    /// Dense realization on emitter ⊗ truncated Fock, emitter as the slow index.
    pub fn realize(&self, t: &FockTruncation) -> Result<DenseOperator, OpsError> {
        let fd = t.dim();
        let mut m = DMatrix::<C64>::zeros(self.dim * fd, self.dim * fd);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let p = self.get(i, j);
                if p.is_zero() {
                    continue;
                }
                let block = super::realize(p, t)?;
                m.view_mut((i * fd, j * fd), (fd, fd))
                    .copy_from(block.matrix());
            }
        }
        let mut dims = vec![self.dim];
        dims.extend(t.dims());
        Ok(DenseOperator::new(m, dims))
    }
}
