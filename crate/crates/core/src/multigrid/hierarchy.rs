use crate::dense::DenseCholesky;
use crate::error::{Error, Result};
use crate::structured::{PreparedOperator, ToeplitzPlusTridiagonal};

use super::coarsening::galerkin_coarsen;
use super::smoother::{positive_diagonal, sweep_prepared, SmootherParams};
use super::transfer::{prolong_add, restrict};

/// Largest coarsest level handed to the dense factorization.
pub const COARSEST_DENSE_CAP: usize = 1024;

#[derive(Debug, Clone)]
struct Level {
    op: PreparedOperator,
    diag: Vec<f64>,
}

/// Level operators from finest to coarsest, linked by Galerkin coarsening,
/// with a dense factorization of the coarsest one.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    levels: Vec<Level>,
    coarsest: DenseCholesky,
    params: SmootherParams,
}

impl Hierarchy {
    /// Coarsen down to a single unknown, where the solve is exact.
    pub fn new(finest: ToeplitzPlusTridiagonal, params: SmootherParams) -> Result<Self> {
        Self::with_coarsest(finest, params, 1)
    }

    /// Coarsen while the level is larger than `coarsest_max` and still
    /// coarsenable.
    pub fn with_coarsest(
        finest: ToeplitzPlusTridiagonal,
        params: SmootherParams,
        coarsest_max: usize,
    ) -> Result<Self> {
        let mut ops = vec![finest];
        loop {
            let last = ops.last().expect("at least the finest level");
            if last.n() <= coarsest_max.max(1) || last.n() < 3 || last.n() % 2 == 0 {
                break;
            }
            ops.push(galerkin_coarsen(last)?);
        }
        Self::from_levels(ops, params)
    }

    /// Exactly one coarse level.
    pub fn two_grid(finest: ToeplitzPlusTridiagonal, params: SmootherParams) -> Result<Self> {
        let coarse = galerkin_coarsen(&finest)?;
        Self::from_levels(vec![finest, coarse], params)
    }

    fn from_levels(ops: Vec<ToeplitzPlusTridiagonal>, params: SmootherParams) -> Result<Self> {
        params.validate()?;
        let last = ops.last().expect("non-empty");
        let coarsest = DenseCholesky::new(&last.to_dense_capped(COARSEST_DENSE_CAP)?)?;
        let levels = ops
            .into_iter()
            .map(|op| {
                Ok(Level {
                    diag: positive_diagonal(&op)?,
                    op: PreparedOperator::new(op),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            levels,
            coarsest,
            params,
        })
    }

    pub fn params(&self) -> SmootherParams {
        self.params
    }

    pub fn set_params(&mut self, params: SmootherParams) -> Result<()> {
        params.validate()?;
        self.params = params;
        Ok(())
    }

    /// Number of levels, finest included.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, index: usize) -> &ToeplitzPlusTridiagonal {
        self.levels[index].op.matrix()
    }

    /// Level operators, finest first.
    pub fn operators(&self) -> impl Iterator<Item = &ToeplitzPlusTridiagonal> {
        self.levels.iter().map(|l| l.op.matrix())
    }

    pub fn finest(&self) -> &PreparedOperator {
        &self.levels[0].op
    }

    pub fn n(&self) -> usize {
        self.levels[0].op.n()
    }

    /// Scalars held by all structured levels plus the dense coarsest factor.
    pub fn stored_scalars(&self) -> usize {
        let n_c = self.levels.last().map_or(0, |l| l.op.n());
        self.operators().map(|a| a.stored_scalars()).sum::<usize>() + n_c * n_c
    }

    /// One V-cycle for `A x = f` starting from `x0`.
    pub fn v_cycle(&self, f: &[f64], x0: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        for len in [f.len(), x0.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        let mut x = x0.to_vec();
        self.cycle(0, f, &mut x)?;
        Ok(x)
    }

    fn cycle(&self, index: usize, f: &[f64], x: &mut [f64]) -> Result<()> {
        if index + 1 == self.levels.len() {
            x.copy_from_slice(&self.coarsest.solve(f)?);
            return Ok(());
        }
        let level = &self.levels[index];
        let p = self.params;
        for _ in 0..p.m1 {
            sweep_prepared(&level.op, &level.diag, x, f, p.omega_pre)?;
        }
        let r = level.op.residual(x, f)?;
        let rc = restrict(&r)?;
        let mut ec = vec![0.0; rc.len()];
        self.cycle(index + 1, &rc, &mut ec)?;
        prolong_add(&ec, x);
        for _ in 0..p.m2 {
            sweep_prepared(&level.op, &level.diag, x, f, p.omega_post)?;
        }
        Ok(())
    }
}

/// Free-function form of [`Hierarchy::v_cycle`].
pub fn v_cycle(h: &Hierarchy, f: &[f64], x0: &[f64]) -> Result<Vec<f64>> {
    h.v_cycle(f, x0)
}
