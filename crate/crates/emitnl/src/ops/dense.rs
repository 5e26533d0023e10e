use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::OpsError;

/// Relative tolerance used to verify Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Square complex matrix on a product space with known factor dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<C64>,
    dims: Vec<usize>,
    hermitian: bool,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<C64>, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.iter().product::<usize>());
        Self {
            matrix,
            dims,
            hermitian: false,
        }
    }

    /// Marks the operator Hermitian after checking it to `1e-12·‖M‖`.
    pub fn into_hermitian(mut self) -> Result<Self, OpsError> {
        let defect = hermitian_defect(&self.matrix);
        if defect > HERMITIAN_TOL * self.matrix.norm().max(f64::MIN_POSITIVE) {
            return Err(OpsError::NotHermitian { defect });
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
            dims,
            hermitian: self.hermitian && other.hermitian,
        }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            matrix: DMatrix::identity(n, n),
            dims,
            hermitian: true,
        }
    }
}

fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues ascending with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

/// Makes the largest-magnitude component real and positive. Components
/// within `1e-10` of the maximum count as tied; the highest index wins.
pub fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() >= max * (1.0 - 1e-10))
        .map(|(i, _)| i)
        .next_back()
        .unwrap_or(0);
    let phase = v[pivot] / v[pivot].norm();
    let rot = phase.conj();
    for c in v.iter_mut() {
        *c *= rot;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

/// Diagonalizes a Hermitian operator.
pub fn eigendecompose(op: &DenseOperator) -> Result<Eigen, OpsError> {
    let m = op.matrix();
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL * m.norm().max(f64::MIN_POSITIVE) {
        return Err(OpsError::NotHermitian { defect });
    }
    eigh(m)
}

pub(crate) fn eigh(m: &DMatrix<C64>) -> Result<Eigen, OpsError> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigen {
            values: vec![],
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or(OpsError::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v: Vec<C64> = eig.eigenvectors.column(i).iter().copied().collect();
        fix_phase(&mut v);
        for (r, c) in v.into_iter().enumerate() {
            vectors[(r, col)] = c;
        }
    }
    Ok(Eigen { values, vectors })
}
