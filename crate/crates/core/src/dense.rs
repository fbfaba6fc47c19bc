//! Dense helpers used as test oracles and for the coarsest-level solve.
//! Nothing here is on the O(n log n) path.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Eigenvalues of a symmetric matrix, sorted non-increasing.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

pub fn matvec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(x)).as_slice().to_vec()
}

/// Maximum absolute row sum.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    factor: Cholesky<f64, Dyn>,
}

impl DenseCholesky {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        Cholesky::new(m.clone())
            .map(|factor| Self { factor })
            .ok_or(Error::NotPositiveDefinite)
    }

    pub fn n(&self) -> usize {
        self.factor.l_dirty().nrows()
    }

    pub fn solve(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: f.len(),
            });
        }
        Ok(self
            .factor
            .solve(&DVector::from_column_slice(f))
            .as_slice()
            .to_vec())
    }
}

pub fn cholesky_solve(m: &DMatrix<f64>, f: &[f64]) -> Result<Vec<f64>> {
    DenseCholesky::new(m)?.solve(f)
}

/// Full-weighting restriction `(1/4)[1 2 1]` from `n_fine = 2m + 1` to `m`.
pub fn restriction_matrix(n_fine: usize) -> Result<DMatrix<f64>> {
    if n_fine < 3 || n_fine.is_multiple_of(2) {
        return Err(Error::NotCoarsenable(n_fine));
    }
    let m = (n_fine - 1) / 2;
    let mut r = DMatrix::zeros(m, n_fine);
    for i in 0..m {
        r[(i, 2 * i)] = 0.25;
        r[(i, 2 * i + 1)] = 0.5;
        r[(i, 2 * i + 2)] = 0.25;
    }
    Ok(r)
}

/// Linear interpolation, `2 R^T`.
pub fn prolongation_matrix(n_fine: usize) -> Result<DMatrix<f64>> {
    Ok(restriction_matrix(n_fine)?.transpose() * 2.0)
}

/// `R A P` by explicit products.
pub fn galerkin_product(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let r = restriction_matrix(a.nrows())?;
    let p = r.transpose() * 2.0;
    Ok(&r * a * &p)
}

/// `tridiag(-1, 2, -1)` of order `n`.
pub fn laplacian(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    })
}

/// Largest eigenvalue of `D^{-1} A`, computed from the similar matrix
/// `D^{-1/2} A D^{-1/2}`.
pub fn jacobi_lambda_max(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        let d = a[(i, i)];
        if d <= 0.0 {
            return Err(Error::NonPositiveDiagonal { row: i, value: d });
        }
        s.push(d.sqrt().recip());
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| s[i] * a[(i, j)] * s[j]);
    Ok(symmetric_eigenvalues(&scaled)[0])
}
