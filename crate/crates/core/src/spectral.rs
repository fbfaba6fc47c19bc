//! Numerical checks of the spectral structure of the constant-kernel matrix
//! and of the sign/dominance structure of both stiffness matrices.
//!
//! With `B'_h = B_h / N = T_{N-1}(g) - (1/N) e e^T` and
//! `g(theta) = 2/3 + cos(theta) / 3`, everything here is a dense eigensolve
//! or an exact rational computation.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_rational::Ratio;

use crate::assembly::{constant_coeffs, Kernel};
use crate::dense::{cholesky_solve, inf_norm, jacobi_lambda_max, laplacian, symmetric_eigenvalues};
use crate::error::{Error, Result};
use crate::multigrid::closed_form_coarse_constant;
use crate::structured::ToeplitzPlusTridiagonal;

/// Largest `N` for which dense eigensolves are attempted.
pub const SPECTRAL_DENSE_CAP: usize = 1024;

/// Relative tolerance for "positive semidefinite": `lambda_min >= -PSD_TOL * ||H||_inf`.
pub const PSD_TOL: f64 = 1e-10;

// Slack for comparisons against eigenvalues that the bounds can attain
// exactly (even-index sine vectors are orthogonal to `e`).
const INTERLACING_SLACK: f64 = 1e-12;

pub fn symbol(theta: f64) -> f64 {
    2.0 / 3.0 + theta.cos() / 3.0
}

/// Samples of `g` on a uniform grid of `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSample {
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
}

impl SymbolSample {
    pub fn uniform(points: usize) -> Self {
        let points = points.max(2);
        let theta: Vec<f64> = (0..points)
            .map(|i| PI * i as f64 / (points - 1) as f64)
            .collect();
        let values = theta.iter().map(|&t| symbol(t)).collect();
        Self { theta, values }
    }
}

fn check_cap(intervals: usize) -> Result<()> {
    if intervals < 2 {
        return Err(Error::InvalidProblem(format!(
            "need N >= 2, got {intervals}"
        )));
    }
    if intervals > SPECTRAL_DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            n: intervals,
            cap: SPECTRAL_DENSE_CAP,
        });
    }
    Ok(())
}

/// `g(j pi / N)`, `j = 1..N-1`: the eigenvalues of `T_{N-1}(g)`, already in
/// non-increasing order.
pub fn tau_eigenvalues(intervals: usize) -> Vec<f64> {
    (1..intervals)
        .map(|j| symbol(j as f64 * PI / intervals as f64))
        .collect()
}

/// `T_{N-1}(g) = tridiag(1/6, 2/3, 1/6)`.
pub fn tau_matrix(intervals: usize) -> DMatrix<f64> {
    let n = intervals - 1;
    DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0 / 3.0,
        1 => 1.0 / 6.0,
        _ => 0.0,
    })
}

/// `B'_h = B_h / N`, dense.
pub fn scaled_constant_matrix(intervals: usize) -> Result<DMatrix<f64>> {
    check_cap(intervals)?;
    let c = constant_coeffs(intervals);
    let nf = intervals as f64;
    let n = intervals - 1;
    Ok(DMatrix::from_fn(n, n, |i, j| c[i.abs_diff(j)] / nf))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    /// 1-based eigenvalue index in non-increasing order.
    pub index: usize,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Eigenvalues of `B'_h`, non-increasing.
    pub lambda_sorted: Vec<f64>,
    pub bound_violations: Vec<BoundViolation>,
    /// `lambda_min(B'_h) * N * sqrt(3)`.
    pub lambda_min_scaled: f64,
}

impl SpectralReport {
    pub fn passed(&self) -> bool {
        self.bound_violations.is_empty()
    }
}

/// `g((j+1) pi / N) <= lambda_j(B'_h) <= g(j pi / N)` for `j <= N-2`,
/// `0 < lambda_{N-1} < g((N-1) pi / N)`, and `1/3 < lambda_j < 1` for
/// `j <= N-2`.
pub fn check_interlacing(intervals: usize) -> Result<SpectralReport> {
    check_cap(intervals)?;
    let lambda = symmetric_eigenvalues(&scaled_constant_matrix(intervals)?);
    let tau = tau_eigenvalues(intervals);
    let n = lambda.len();
    let mut bound_violations = Vec::new();
    for (j, &value) in lambda.iter().enumerate() {
        let (lower, upper) = if j + 1 < n {
            (tau[j + 1].max(1.0 / 3.0), tau[j].min(1.0))
        } else {
            (0.0, tau[j])
        };
        let ok = if j + 1 < n {
            value >= lower - INTERLACING_SLACK
                && value <= upper + INTERLACING_SLACK
                && value > 1.0 / 3.0
                && value < 1.0
        } else {
            value > 0.0 && value <= upper + INTERLACING_SLACK
        };
        if !ok {
            bound_violations.push(BoundViolation {
                index: j + 1,
                value,
                lower,
                upper,
            });
        }
    }
    let lambda_min_scaled = lambda[n - 1] * intervals as f64 * 3f64.sqrt();
    Ok(SpectralReport {
        lambda_sorted: lambda,
        bound_violations,
        lambda_min_scaled,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinEigenReport {
    /// `lambda_min(B'_h) * N * sqrt(3)`.
    pub scaled: f64,
    pub lambda_min: f64,
    /// Rayleigh quotient of `e` computed from the matrix.
    pub rayleigh: f64,
    /// `(N - 1 - 1/3 - (N-1)^2 / N) / (N - 1)`.
    pub rayleigh_closed_form: f64,
}

impl MinEigenReport {
    /// `lambda_min` does not exceed the Rayleigh quotient of `e`.
    pub fn rayleigh_bound_holds(&self) -> bool {
        self.lambda_min <= self.rayleigh * (1.0 + 1e-12)
    }
}

pub fn lambda_min_asymptotics(intervals: usize) -> Result<MinEigenReport> {
    check_cap(intervals)?;
    let b = scaled_constant_matrix(intervals)?;
    let lambda_min = *symmetric_eigenvalues(&b).last().expect("N >= 2");
    let n = intervals - 1;
    let rayleigh = b.sum() / n as f64;
    let (nf, mf) = (intervals as f64, n as f64);
    let rayleigh_closed_form = (mf - 1.0 / 3.0 - mf * mf / nf) / mf;
    Ok(MinEigenReport {
        scaled: lambda_min * nf * 3f64.sqrt(),
        lambda_min,
        rayleigh,
        rayleigh_closed_form,
    })
}

/// `phi(N) = 1 - 4x/N` with `x = e^T tridiag(1,2,1)^{-1} e`, exactly.
///
/// `tridiag(1,2,1) = S L S` with `S = diag((-1)^i)` and `L = tridiag(-1,2,-1)`,
/// whose inverse has entries `min(r,c) (N - max(r,c)) / N`, so
/// `N x = sum (-1)^{r+c} min(r,c) (N - max(r,c))`.
pub fn phi_exact(intervals: usize) -> Ratio<i128> {
    let big_n = intervals as i128;
    let mut nx: i128 = 0;
    for r in 1..big_n {
        // diagonal plus twice the strict upper triangle
        nx += r * (big_n - r);
        for c in r + 1..big_n {
            let term = r * (big_n - c);
            nx += if (r + c) % 2 == 0 {
                2 * term
            } else {
                -2 * term
            };
        }
    }
    Ratio::new(big_n * big_n - 4 * nx, big_n * big_n)
}

/// Same quantity by a dense solve with `tridiag(1,2,1)`.
pub fn phi_dense(intervals: usize) -> Result<f64> {
    check_cap(intervals)?;
    let n = intervals - 1;
    let m = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => 1.0,
        _ => 0.0,
    });
    let y = cholesky_solve(&m, &vec![1.0; n])?;
    Ok(1.0 - 4.0 * y.iter().sum::<f64>() / intervals as f64)
}

/// `0` for even `N`, `1/N^2` for odd `N`.
pub fn phi_expected(intervals: usize) -> Ratio<i128> {
    let big_n = intervals as i128;
    if big_n % 2 == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(1, big_n * big_n)
    }
}

/// `H = B_h - (N/12) L_{N-1}`.
pub fn gap_matrix(intervals: usize) -> Result<DMatrix<f64>> {
    check_cap(intervals)?;
    let c = constant_coeffs(intervals);
    let n = intervals - 1;
    let b = DMatrix::from_fn(n, n, |i, j| c[i.abs_diff(j)]);
    Ok(b - laplacian(n) * (intervals as f64 / 12.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub phi_exact: Ratio<i128>,
    pub phi_expected: Ratio<i128>,
    pub phi_dense: f64,
    pub lambda_min: f64,
    pub norm_inf: f64,
}

impl GapReport {
    pub fn psd(&self) -> bool {
        self.lambda_min >= -PSD_TOL * self.norm_inf
    }

    pub fn phi_matches(&self) -> bool {
        self.phi_exact == self.phi_expected
    }

    /// Dense and exact values of `phi` agree to round-off.
    pub fn phi_cross_checked(&self) -> bool {
        let exact = *self.phi_exact.numer() as f64 / *self.phi_exact.denom() as f64;
        (self.phi_dense - exact).abs() <= 1e-9
    }

    pub fn passed(&self) -> bool {
        self.psd() && self.phi_matches() && self.phi_cross_checked()
    }
}

pub fn det_identity_check(intervals: usize) -> Result<GapReport> {
    let h = gap_matrix(intervals)?;
    let lambda_min = *symmetric_eigenvalues(&h).last().expect("N >= 2");
    Ok(GapReport {
        phi_exact: phi_exact(intervals),
        phi_expected: phi_expected(intervals),
        phi_dense: phi_dense(intervals)?,
        lambda_min,
        norm_inf: inf_norm(&h),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseGapReport {
    pub lambda_min: f64,
    pub norm_inf: f64,
    /// Max entrywise relative difference between `2^{4-4k} H^{(k)}` and the
    /// finest-level gap matrix of size `N / 2^{k-1}`.
    pub rescale_error: f64,
}

impl CoarseGapReport {
    pub fn psd(&self) -> bool {
        self.lambda_min >= -PSD_TOL * self.norm_inf
    }
}

/// `H^{(k)} = B^{(k)} - (2^{3k-5}/3) N L` on level `k` (unnormalized
/// coarsening), checked for semidefiniteness and against the rescaled
/// finest-level gap matrix.
pub fn coarse_psd_check(intervals: usize, k: u32) -> Result<CoarseGapReport> {
    check_cap(intervals)?;
    let b = closed_form_coarse_constant(intervals, k)?;
    let reduced = intervals >> (k - 1);
    if reduced < 4 {
        return Err(Error::LevelOutOfRange {
            k,
            min: 1,
            max: intervals.trailing_zeros() - 1,
        });
    }
    let n = b.len();
    let weight = 2f64.powi(3 * k as i32 - 5) / 3.0 * intervals as f64;
    let h = DMatrix::from_fn(n, n, |i, j| b[i.abs_diff(j)]) - laplacian(n) * weight;
    let lambda_min = *symmetric_eigenvalues(&h).last().expect("n >= 1");
    let rescaled = &h * 2f64.powi(4 - 4 * k as i32);
    let reference = gap_matrix(reduced)?;
    let scale = reference.abs().max();
    let rescale_error = (rescaled - &reference).abs().max() / scale;
    Ok(CoarseGapReport {
        lambda_min,
        norm_inf: inf_norm(&h),
        rescale_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    /// `b_{i,j} < 0` for `j != i`.
    OffDiagonalSign,
    /// `b~_{i,i} < 0`.
    BoundaryDiagonalSign,
    /// `b~_{i,i+1} < 0`.
    BoundaryOffSign,
    /// `sum_j b_{i,j} > 0`.
    RowSum,
    /// `b_{i,i} > sum_{j != i} |b_{i,j}|`.
    DiagonalDominance,
    /// `r_i < 2 a_{i,i}` (constant kernel).
    Gerschgorin,
    /// `lambda_max(D^{-1} A)` inside `[1, 2)` or `[1, 3)`.
    JacobiSpectrum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyViolation {
    pub property: Property,
    /// 0-based row and column; `None` for whole-matrix properties.
    pub at: Option<(usize, usize)>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub violations: Vec<PropertyViolation>,
    pub lambda_max: f64,
    /// `min_i (a_{i,i} - r_i)`, relative to the largest diagonal entry.
    pub min_dominance_margin: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sign, row-sum and dominance structure of a stiffness matrix.
///
/// Fractional: off-diagonals, `b~_{i,i}` and `b~_{i,i+1}` negative, row sums
/// positive, strict diagonal dominance, `lambda_max(D^{-1}A) in [1, 2)`.
/// Constant: `r_i < 2 a_{i,i}` and `lambda_max(D^{-1}A) in [1, 3)`.
pub fn coefficient_property_check(
    a: &ToeplitzPlusTridiagonal,
    kernel: Kernel,
) -> Result<PropertyReport> {
    let d = a.to_dense_capped(SPECTRAL_DENSE_CAP)?;
    let n = a.n();
    let mut violations = Vec::new();
    let mut push = |property, at, value| {
        violations.push(PropertyViolation {
            property,
            at,
            value,
        })
    };
    let fractional = matches!(kernel, Kernel::Fractional { .. });

    if fractional {
        for (i, &v) in a.tridiag().diag().iter().enumerate() {
            if v >= 0.0 {
                push(Property::BoundaryDiagonalSign, Some((i, i)), v);
            }
        }
        for (i, &v) in a.tridiag().off().iter().enumerate() {
            if v >= 0.0 {
                push(Property::BoundaryOffSign, Some((i, i + 1)), v);
            }
        }
    }

    let max_diag = (0..n).map(|i| d[(i, i)]).fold(f64::MIN, f64::max);
    let mut min_margin = f64::INFINITY;
    for i in 0..n {
        let diag = d[(i, i)];
        let mut row = 0.0;
        let mut radius = 0.0;
        for j in 0..n {
            row += d[(i, j)];
            if j != i {
                radius += d[(i, j)].abs();
                if fractional && d[(i, j)] >= 0.0 {
                    push(Property::OffDiagonalSign, Some((i, j)), d[(i, j)]);
                }
            }
        }
        min_margin = min_margin.min((diag - radius) / max_diag);
        if fractional {
            if row <= 0.0 {
                push(Property::RowSum, Some((i, i)), row);
            }
            if diag <= radius {
                push(Property::DiagonalDominance, Some((i, i)), diag - radius);
            }
        } else if radius >= 2.0 * diag {
            push(Property::Gerschgorin, Some((i, i)), 2.0 * diag - radius);
        }
    }

    let lambda_max = jacobi_lambda_max(&d)?;
    let upper = kernel.eta0_bound();
    // lambda_max >= max_i (D^{-1/2} A D^{-1/2})_{ii} = 1 exactly; allow round-off
    if !(lambda_max >= 1.0 - 1e-12 && lambda_max < upper) {
        push(Property::JacobiSpectrum, None, lambda_max);
    }

    Ok(PropertyReport {
        violations,
        lambda_max,
        min_dominance_margin: min_margin,
    })
}

/// Residuals of the two row-sum identities for level-`k` constant-kernel
/// coefficients on a level with `reduced = N / 2^{k-1}` intervals:
/// `2b_0 - 2b_1 - reduced * 2^{4k-4}` (used when `b_1 >= 0`) and
/// `b_0 + 2b_1 - (reduced - 3) * 2^{4k-4}` (used when `b_1 <= 0`).
/// Returns the residual(s) that apply.
pub fn row_sum_identities(coeffs: &[f64], k: u32, reduced: usize) -> Vec<f64> {
    let base = 2f64.powi(4 * k as i32 - 4);
    let (b0, b1) = (coeffs[0], coeffs.get(1).copied().unwrap_or(0.0));
    let m = reduced as f64;
    let mut out = Vec::new();
    if b1 >= 0.0 {
        out.push(2.0 * b0 - 2.0 * b1 - m * base);
    }
    if b1 <= 0.0 {
        out.push(b0 + 2.0 * b1 - (m - 3.0) * base);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, ProblemSpec};

    #[test]
    fn symbol_range_and_monotonicity() {
        let s = SymbolSample::uniform(101);
        assert!(s
            .values
            .iter()
            .all(|&v| (1.0 / 3.0 - 1e-15..=1.0 + 1e-15).contains(&v)));
        assert!(s.values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn tau_small_cases() {
        assert_eq!(tau_eigenvalues(2), vec![2.0 / 3.0]);
        let t = tau_eigenvalues(4);
        let r = 2f64.sqrt() / 6.0;
        for (a, b) in t.iter().zip([2.0 / 3.0 + r, 2.0 / 3.0, 2.0 / 3.0 - r]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn tau_matches_dense() {
        for big_n in [16, 64, 200] {
            let dense = symmetric_eigenvalues(&tau_matrix(big_n));
            for (a, b) in tau_eigenvalues(big_n).iter().zip(&dense) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn interlacing_small() {
        for big_n in [2, 3, 16, 128] {
            let r = check_interlacing(big_n).unwrap();
            assert!(r.passed(), "N = {big_n}: {:?}", r.bound_violations);
        }
        assert!(check_interlacing(2048).is_err());
    }

    #[test]
    fn rayleigh_quotient_of_ones() {
        for big_n in [8, 64, 257] {
            let r = lambda_min_asymptotics(big_n).unwrap();
            assert!((r.rayleigh - r.rayleigh_closed_form).abs() < 1e-13);
            assert!(r.rayleigh_bound_holds());
        }
    }

    #[test]
    fn lambda_min_trend() {
        let small = lambda_min_asymptotics(64).unwrap().scaled;
        let large = lambda_min_asymptotics(512).unwrap().scaled;
        assert!((large - 1.0).abs() < (small - 1.0).abs());
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi_exact(8), Ratio::from_integer(0));
        assert_eq!(phi_exact(9), Ratio::new(1, 81));
        for big_n in 2..40 {
            assert_eq!(phi_exact(big_n), phi_expected(big_n), "N = {big_n}");
        }
        assert!((phi_dense(9).unwrap() - 1.0 / 81.0).abs() < 1e-12);
    }

    #[test]
    fn gap_matrix_semidefinite() {
        let r = det_identity_check(64).unwrap();
        assert!(r.passed());
        assert!(r.lambda_min <= 1e-6 * r.norm_inf);
        assert!(det_identity_check(9).unwrap().lambda_min > 0.0);
        // H = (N/4) tridiag(1,2,1) - e e^T
        let h = gap_matrix(8).unwrap();
        assert!(
            (h[(0, 0)] - 3.0).abs() < 1e-14
                && (h[(0, 1)] - 1.0).abs() < 1e-14
                && (h[(0, 5)] + 1.0).abs() < 1e-14
        );
    }

    #[test]
    fn coarse_gap_matrices() {
        let r = coarse_psd_check(64, 3).unwrap();
        assert!(r.psd());
        for k in [2, 3] {
            assert!(coarse_psd_check(64, k).unwrap().rescale_error < 1e-12);
        }
        // k = 1 is the finest gap matrix itself
        let r1 = coarse_psd_check(64, 1).unwrap();
        let g = det_identity_check(64).unwrap();
        assert_eq!(r1.rescale_error, 0.0);
        assert!((r1.lambda_min - g.lambda_min).abs() < 1e-10 * g.norm_inf);
        assert!(coarse_psd_check(64, 6).is_err());
    }

    #[test]
    fn fractional_properties_hold() {
        let spec = ProblemSpec::new(Kernel::fractional(1.7).unwrap(), 7).unwrap();
        let r = coefficient_property_check(&assemble(&spec).unwrap(), spec.kernel()).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert!(r.min_dominance_margin > 0.0);
    }

    #[test]
    fn constant_properties_hold() {
        for big_n in [6, 128] {
            let spec = ProblemSpec::with_intervals(Kernel::Constant, big_n).unwrap();
            let r =
                coefficient_property_check(&assemble(&spec).unwrap(), Kernel::Constant).unwrap();
            assert!(r.passed(), "{:?}", r.violations);
            assert!(r.lambda_max >= 1.0 && r.lambda_max < 3.0);
        }
    }

    #[test]
    fn row_sum_identities_including_zero_b1() {
        // N = 6 has b_1 = 0, so both identities apply
        let res = row_sum_identities(&constant_coeffs(6), 1, 6);
        assert_eq!(res.len(), 2);
        assert!(res.iter().all(|r| r.abs() < 1e-12));
        for q in [4usize, 7] {
            let big_n = 1 << q;
            for k in 1..=q as u32 {
                let b = closed_form_coarse_constant(big_n, k).unwrap();
                if b.len() < 3 {
                    continue;
                }
                let res = row_sum_identities(&b, k, big_n >> (k - 1));
                assert!(
                    res.iter().all(|r| r.abs() <= 1e-12 * b[0].abs()),
                    "q {q} k {k}: {res:?}"
                );
            }
        }
    }

    #[test]
    fn corrupted_coefficient_is_pinpointed() {
        let spec = ProblemSpec::new(Kernel::fractional(1.5).unwrap(), 4).unwrap();
        let a = assemble(&spec).unwrap();
        let (scale, t, e) = a.into_parts();
        let mut c = t.coeffs().to_vec();
        c[3] = 0.5;
        let bad = ToeplitzPlusTridiagonal::new(
            scale,
            crate::structured::SymmetricToeplitz::new(c).unwrap(),
            e,
        )
        .unwrap();
        let r = coefficient_property_check(&bad, spec.kernel()).unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| v.property == Property::OffDiagonalSign && v.at == Some((0, 3))));
    }
}
