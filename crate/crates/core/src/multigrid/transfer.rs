//! Full-weighting restriction and linear interpolation with homogeneous
//! Dirichlet ends.

use crate::error::{Error, Result};

/// `v_c[i] = (v[2i] + 2 v[2i+1] + v[2i+2]) / 4` (0-based), fine length `2m + 1`.
pub fn restrict(v: &[f64]) -> Result<Vec<f64>> {
    if v.len().is_multiple_of(2) {
        return Err(Error::EvenLength(v.len()));
    }
    let m = (v.len() - 1) / 2;
    Ok((0..m)
        .map(|i| 0.25 * (v[2 * i] + 2.0 * v[2 * i + 1] + v[2 * i + 2]))
        .collect())
}

/// `2 R^T v`: odd fine points copy, even fine points average their coarse
/// neighbours (zero beyond the ends).
pub fn prolong(v: &[f64]) -> Vec<f64> {
    let m = v.len();
    let mut fine = vec![0.0; 2 * m + 1];
    for (i, &vi) in v.iter().enumerate() {
        fine[2 * i] += 0.5 * vi;
        fine[2 * i + 1] = vi;
        fine[2 * i + 2] += 0.5 * vi;
    }
    fine
}

/// `x += 2 R^T v` without the intermediate allocation.
pub(crate) fn prolong_add(v: &[f64], x: &mut [f64]) {
    for (i, &vi) in v.iter().enumerate() {
        x[2 * i] += 0.5 * vi;
        x[2 * i + 1] += vi;
        x[2 * i + 2] += 0.5 * vi;
    }
}
