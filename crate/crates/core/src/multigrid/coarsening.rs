//! Galerkin coarsening `R A P` carried out on the structured representation,
//! and the closed forms for repeated coarsening of a Toeplitz part.

use crate::error::{Error, Result};
use crate::structured::{SymmetricToeplitz, SymmetricTridiagonal, ToeplitzPlusTridiagonal};

fn coarse_dim(n: usize) -> Result<usize> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::NotCoarsenable(n));
    }
    Ok((n - 1) / 2)
}

/// One Galerkin step on Toeplitz coefficients in the `L = 4R` convention
/// (no `1/8` factor).
fn coarsen_toeplitz_raw(c: &[f64]) -> Result<Vec<f64>> {
    let m = coarse_dim(c.len())?;
    let at = |i: isize| c[i.unsigned_abs()];
    Ok((0..m as isize)
        .map(|d| {
            at(2 * d - 2)
                + 4.0 * at(2 * d - 1)
                + 6.0 * at(2 * d)
                + 4.0 * at(2 * d + 1)
                + at(2 * d + 2)
        })
        .collect())
}

/// Exact `R A P` with `R = (1/4)[1 2 1]` and `P = 2 R^T`. The Toeplitz part
/// stays Toeplitz and the tridiagonal part stays tridiagonal.
pub fn galerkin_coarsen(a: &ToeplitzPlusTridiagonal) -> Result<ToeplitzPlusTridiagonal> {
    let m = coarse_dim(a.n())?;
    let coeffs: Vec<f64> = coarsen_toeplitz_raw(a.toeplitz().coeffs())?
        .into_iter()
        .map(|v| v / 8.0)
        .collect();

    let (ad, bd) = (a.tridiag().diag(), a.tridiag().off());
    let diag = (0..m)
        .map(|i| {
            (ad[2 * i] + 4.0 * (bd[2 * i] + bd[2 * i + 1] + ad[2 * i + 1]) + ad[2 * i + 2]) / 8.0
        })
        .collect();
    let off = (0..m - 1)
        .map(|i| (ad[2 * i + 2] + 2.0 * (bd[2 * i + 1] + bd[2 * i + 2])) / 8.0)
        .collect();

    ToeplitzPlusTridiagonal::new(
        a.scale(),
        SymmetricToeplitz::new(coeffs)?,
        SymmetricTridiagonal::new(diag, off)?,
    )
}

/// `C_k = 2^{k-2} (2^{2k-2} - 1) / 3`.
pub fn c_k(k: u32) -> f64 {
    2f64.powi(k as i32 - 2) * (2f64.powi(2 * k as i32 - 2) - 1.0) / 3.0
}

/// Dimension after `k - 1` coarsenings of a level-1 operator of size `n1`.
fn level_dim(n1: usize, k: u32) -> Result<usize> {
    let p = 1usize << (k - 1);
    if !(n1 + 1).is_multiple_of(p) || (n1 + 1) / p < 2 {
        return Err(Error::NotCoarsenable(n1));
    }
    Ok((n1 + 1) / p - 1)
}

/// Toeplitz coefficients of the level-`k` operator obtained from the level-1
/// coefficients `c1` by `k - 1` coarsenings, in the `L = 4R` convention:
/// the Galerkin-normalized coefficients are `8^{-(k-1)}` times the output.
///
/// Every output coefficient is a fixed combination of at most `4 * 2^{k-1}`
/// input coefficients with polynomial weights in the offset.
pub fn closed_form_coarse_toeplitz(c1: &[f64], k: u32) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::LevelOutOfRange {
            k,
            min: 2,
            max: u32::MAX,
        });
    }
    let n_out = level_dim(c1.len(), k)?;
    let a = |m: usize| c1.get(m).copied().unwrap_or(0.0);
    let p = 2f64.powi(k as i32 - 1);
    let pi = 1usize << (k - 1);
    let big_k = 2.0 * p;
    let ck = c_k(k);
    let cube = |t: f64| (t - 1.0) * t * (t + 1.0);

    let w0 = |m: usize| {
        let mf = m as f64;
        if m <= pi {
            8.0 * ck - (mf * mf - 1.0) * (big_k - mf)
        } else {
            cube(big_k - mf) / 3.0
        }
    };
    let w1 = |m: usize| {
        let mf = m as f64;
        if m <= pi {
            2.0 * ck + mf * mf * p - 2.0 / 3.0 * cube(mf)
        } else if m <= 2 * pi {
            let u = big_k - mf;
            2.0 * ck + u * u * p - 2.0 / 3.0 * cube(u) - cube(mf - p) / 6.0
        } else {
            cube(3.0 * p - mf) / 6.0
        }
    };
    let wj = |j: usize, m: usize| {
        let (jf, mf) = (j as f64, m as f64);
        if m <= (j - 1) * pi {
            cube(mf - (jf - 2.0) * p) / 6.0
        } else if m <= j * pi {
            let t = mf - (jf - 1.0) * p;
            let u = jf * p - mf;
            2.0 * ck + t * t * p - cube(u) / 6.0 - 2.0 / 3.0 * cube(t)
        } else if m <= (j + 1) * pi {
            let t = mf - jf * p;
            let u = (jf + 1.0) * p - mf;
            2.0 * ck + u * u * p - cube(t) / 6.0 - 2.0 / 3.0 * cube(u)
        } else {
            cube((jf + 2.0) * p - mf) / 6.0
        }
    };

    Ok((0..n_out)
        .map(|j| match j {
            0 => (4.0 * ck + p) * a(0) + (1..2 * pi).map(|m| w0(m) * a(m)).sum::<f64>(),
            1 => ck * a(0) + (1..3 * pi).map(|m| w1(m) * a(m)).sum::<f64>(),
            _ => ((j - 2) * pi..(j + 2) * pi).map(|m| wj(j, m) * a(m)).sum(),
        })
        .collect())
}

/// Level-`k` Toeplitz coefficients of the constant kernel for `N = 2^q`
/// intervals, `L = 4R` convention, unscaled:
/// `b_0 = 2^{3k-2} N / 3 - 2^{4k-4}`, `b_1 = 2^{3k-4} N / 3 - 2^{4k-4}`,
/// `b_l = -2^{4k-4}`.
pub fn closed_form_coarse_constant(intervals: usize, k: u32) -> Result<Vec<f64>> {
    if !intervals.is_power_of_two() || intervals < 2 {
        return Err(Error::InvalidProblem(format!(
            "N = {intervals} is not a power of two"
        )));
    }
    let q = intervals.trailing_zeros();
    if k < 1 || k > q {
        return Err(Error::LevelOutOfRange { k, min: 1, max: q });
    }
    let big_n = intervals as f64;
    let n_out = (intervals >> (k - 1)) - 1;
    let base = 2f64.powi(4 * k as i32 - 4);
    let mut b = vec![-base; n_out];
    b[0] = 2f64.powi(3 * k as i32 - 2) * big_n / 3.0 - base;
    if n_out > 1 {
        b[1] = 2f64.powi(3 * k as i32 - 4) * big_n / 3.0 - base;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{
        assemble, constant_coeffs, fractional_toeplitz_coeffs, Kernel, ProblemSpec,
    };
    use crate::dense::galerkin_product;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_rel(a: &[f64], b: &[f64]) -> f64 {
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / scale
    }

    fn recursive(c: &[f64], k: u32) -> Vec<f64> {
        let mut cur = c.to_vec();
        for _ in 1..k {
            cur = coarsen_toeplitz_raw(&cur).unwrap();
        }
        cur
    }

    #[test]
    fn zero_maps_to_zero() {
        let a = ToeplitzPlusTridiagonal::new(
            1.0,
            SymmetricToeplitz::zeros(7).unwrap(),
            SymmetricTridiagonal::zeros(7).unwrap(),
        )
        .unwrap();
        let c = galerkin_coarsen(&a).unwrap();
        assert_eq!(c.n(), 3);
        assert!(c.to_dense().unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(
            galerkin_coarsen(
                &ToeplitzPlusTridiagonal::toeplitz_only(1.0, SymmetricToeplitz::zeros(6).unwrap())
                    .unwrap()
            )
            .unwrap_err(),
            Error::NotCoarsenable(6)
        );
    }

    #[test]
    fn fractional_coarsening_matches_dense_product() {
        for q in [3, 5, 8] {
            let spec = ProblemSpec::new(Kernel::fractional(1.5).unwrap(), q).unwrap();
            let mut a = assemble(&spec).unwrap();
            while a.n() >= 3 {
                let coarse = galerkin_coarsen(&a).unwrap();
                let dense = galerkin_product(&a.to_dense().unwrap()).unwrap();
                let got = coarse.to_dense().unwrap();
                let scale = dense.abs().max();
                assert!(
                    (got - &dense).abs().max() <= 1e-12 * scale,
                    "q {q} n {}",
                    a.n()
                );
                a = coarse;
            }
        }
    }

    #[test]
    fn c_k_values() {
        assert_eq!(c_k(2), 1.0);
        assert_eq!(c_k(3), 10.0);
    }

    #[test]
    fn closed_form_constant_examples() {
        let k1 = closed_form_coarse_constant(16, 1).unwrap();
        assert!(max_rel(&k1, &constant_coeffs(16)) < 1e-15);
        let k2 = closed_form_coarse_constant(16, 2).unwrap();
        assert_eq!(k2.len(), 7);
        assert!((k2[0] - 208.0 / 3.0).abs() < 1e-12);
        assert!((k2[1] - 16.0 / 3.0).abs() < 1e-12);
        assert!(k2[2..].iter().all(|&v| v == -16.0));
        assert!(closed_form_coarse_constant(16, 5).is_err());
        assert!(closed_form_coarse_constant(16, 0).is_err());
        assert!(closed_form_coarse_constant(12, 1).is_err());
    }

    #[test]
    fn closed_form_constant_matches_recursion() {
        for q in [4, 6, 9] {
            let big_n = 1usize << q;
            let c = constant_coeffs(big_n);
            for k in 1..=q {
                assert!(
                    max_rel(
                        &closed_form_coarse_constant(big_n, k).unwrap(),
                        &recursive(&c, k)
                    ) < 1e-12
                );
            }
        }
    }

    #[test]
    fn closed_form_toeplitz_matches_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [5, 7, 9] {
            let big_n = 1usize << q;
            let inputs = [
                constant_coeffs(big_n),
                fractional_toeplitz_coeffs(1.3, big_n - 1).unwrap(),
                (0..big_n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            ];
            for c in &inputs {
                for k in 2..=q {
                    let closed = closed_form_coarse_toeplitz(c, k).unwrap();
                    assert!(max_rel(&closed, &recursive(c, k)) < 1e-10, "q {q} k {k}");
                }
            }
        }
    }

    #[test]
    fn closed_form_galerkin_normalization() {
        // 8^{-(k-1)} * closed form == (k-1) structured Galerkin steps
        let spec = ProblemSpec::new(Kernel::fractional(1.3).unwrap(), 6).unwrap();
        let a = assemble(&spec).unwrap();
        let mut cur = a.clone();
        for k in 2..=4u32 {
            cur = galerkin_coarsen(&cur).unwrap();
            let closed: Vec<f64> = closed_form_coarse_toeplitz(a.toeplitz().coeffs(), k)
                .unwrap()
                .iter()
                .map(|v| v * 8f64.powi(1 - k as i32))
                .collect();
            assert!(max_rel(&closed, cur.toeplitz().coeffs()) < 1e-10);
        }
        assert!(closed_form_coarse_toeplitz(a.toeplitz().coeffs(), 1).is_err());
    }
}
