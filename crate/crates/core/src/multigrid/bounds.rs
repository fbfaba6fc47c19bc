//! Two-grid/V-cycle contraction bounds and their measured counterparts.

use nalgebra::DMatrix;

use crate::assembly::Kernel;
use crate::dense::jacobi_lambda_max;
use crate::error::{Error, Result};

use super::hierarchy::Hierarchy;

/// Bound with the kernel's nominal `eta_0` (2 fractional, 3 constant).
/// For the fractional kernel with `omega = 1` this is the degenerate
/// `eta = 0` case and is rejected; use [`theoretical_bound_with_eta0`] with a
/// computed `eta_0` instead.
pub fn theoretical_bound(kernel: Kernel, omega: f64) -> Result<f64> {
    theoretical_bound_with_eta0(kernel, omega, kernel.eta0_bound())
}

/// `sqrt(1 - 2 eta / 5)` (fractional) or `sqrt(1 - eta / 4)` (constant), with
/// `eta = omega (2 - omega eta_0)`.
pub fn theoretical_bound_with_eta0(kernel: Kernel, omega: f64, eta0: f64) -> Result<f64> {
    let limit = 2.0 / eta0;
    if !(omega.is_finite() && omega > 0.0 && omega < limit) {
        return Err(Error::InadmissibleOmega { omega, limit });
    }
    let eta = omega * (2.0 - omega * eta0);
    let bound = match kernel {
        Kernel::Fractional { .. } => (1.0 - 0.4 * eta).sqrt(),
        Kernel::Constant => (1.0 - 0.25 * eta).sqrt(),
    };
    Ok(bound)
}

/// `lambda_max(D^{-1} A)` of every level, by dense eigensolve.
pub fn level_jacobi_lambdas(h: &Hierarchy) -> Result<Vec<f64>> {
    h.operators()
        .map(|a| jacobi_lambda_max(&a.to_dense_capped(1024)?))
        .collect()
}

fn energy_norm(h: &Hierarchy, v: &[f64]) -> Result<f64> {
    let av = h.finest().apply(v)?;
    Ok(v.iter()
        .zip(&av)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .max(0.0)
        .sqrt())
}

/// `||E e||_A / ||e||_A` of one V-cycle for each initial error `e`, where
/// `E e` is a cycle on `A x = 0` started from `e`.
pub fn energy_contraction(h: &Hierarchy, initial_errors: &[Vec<f64>]) -> Result<Vec<f64>> {
    let zero = vec![0.0; h.n()];
    initial_errors
        .iter()
        .map(|e| {
            let next = h.v_cycle(&zero, e)?;
            Ok(energy_norm(h, &next)? / energy_norm(h, e)?)
        })
        .collect()
}

/// Exact `||E||_A` of the V-cycle error propagator, assembled column by
/// column. Dense; `n <= 1024`.
pub fn energy_norm_dense(h: &Hierarchy) -> Result<f64> {
    let n = h.n();
    let a = h.level(0).to_dense_capped(1024)?;
    let zero = vec![0.0; n];
    let mut e = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        let col = h.v_cycle(&zero, &unit)?;
        e.set_column(j, &nalgebra::DVector::from_vec(col));
    }
    let l = a.cholesky().ok_or(Error::NotPositiveDefinite)?.l();
    // M = L^T E L^{-T}; X^T = L^{-1} E^T gives X = E L^{-T}
    let xt = l
        .solve_lower_triangular(&e.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    let m = l.transpose() * xt.transpose();
    Ok(m.singular_values().max())
}
