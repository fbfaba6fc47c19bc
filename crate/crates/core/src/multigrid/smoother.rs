use crate::error::{Error, Result};
use crate::structured::{PreparedOperator, ToeplitzPlusTridiagonal};

/// Smoothing schedule of a V-cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherParams {
    /// Presmoothing sweeps.
    pub m1: usize,
    /// Postsmoothing sweeps.
    pub m2: usize,
    pub omega_pre: f64,
    pub omega_post: f64,
}

impl SmootherParams {
    /// `(1, 2)` sweeps with `omega = (1, 1)`.
    pub const FRACTIONAL: Self = Self {
        m1: 1,
        m2: 2,
        omega_pre: 1.0,
        omega_post: 1.0,
    };

    /// `(1, 2)` sweeps with `omega = (1/2, 1)`.
    pub const CONSTANT: Self = Self {
        m1: 1,
        m2: 2,
        omega_pre: 0.5,
        omega_post: 1.0,
    };

    pub fn for_kernel(kernel: crate::assembly::Kernel) -> Self {
        match kernel {
            crate::assembly::Kernel::Fractional { .. } => Self::FRACTIONAL,
            crate::assembly::Kernel::Constant => Self::CONSTANT,
        }
    }

    /// Damping factors must lie in `(0, 2)`; the sharper `2 / eta_0` limit
    /// depends on the operator and is checked where `eta_0` is known.
    pub fn validate(&self) -> Result<()> {
        for omega in [self.omega_pre, self.omega_post] {
            if !(omega.is_finite() && omega > 0.0 && omega < 2.0) {
                return Err(Error::InadmissibleOmega { omega, limit: 2.0 });
            }
        }
        Ok(())
    }
}

/// Diagonal of `A`, read off the structure; rejects non-positive entries.
pub fn positive_diagonal(a: &ToeplitzPlusTridiagonal) -> Result<Vec<f64>> {
    (0..a.n())
        .map(|row| {
            let value = a.diagonal_entry(row);
            if value > 0.0 {
                Ok(value)
            } else {
                Err(Error::NonPositiveDiagonal { row, value })
            }
        })
        .collect()
}

/// One damped Jacobi sweep `x + omega D^{-1} (f - A x)`.
pub fn jacobi_sweep(
    a: &ToeplitzPlusTridiagonal,
    x: &[f64],
    f: &[f64],
    omega: f64,
) -> Result<Vec<f64>> {
    let diag = positive_diagonal(a)?;
    let mut x = x.to_vec();
    sweep_prepared(&PreparedOperator::new(a.clone()), &diag, &mut x, f, omega)?;
    Ok(x)
}

pub(crate) fn sweep_prepared(
    a: &PreparedOperator,
    diag: &[f64],
    x: &mut [f64],
    f: &[f64],
    omega: f64,
) -> Result<()> {
    let r = a.residual(x, f)?;
    for ((xi, ri), di) in x.iter_mut().zip(&r).zip(diag) {
        *xi += omega * ri / di;
    }
    Ok(())
}
