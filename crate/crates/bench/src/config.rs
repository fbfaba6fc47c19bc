use std::ops::RangeInclusive;

use clap::ValueEnum;
use nlmg::assembly::Kernel;
use nlmg::multigrid::{SmootherParams, SolverOptions};

use crate::error::{BenchError, Result};

pub const Q_MIN: u32 = 3;
pub const Q_MAX: u32 = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Convergence,
    Verify,
    Scaling,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

/// One study: a kernel, a range of levels `q` (`N = 2^q`) and solver knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    pub kernel: Kernel,
    pub q_min: u32,
    pub q_max: u32,
    pub params: SmootherParams,
    pub tol: f64,
    pub format: Format,
    pub mode: Mode,
}

impl StudyConfig {
    pub fn new(
        kernel: Kernel,
        q_min: u32,
        q_max: u32,
        params: SmootherParams,
        tol: f64,
        format: Format,
        mode: Mode,
    ) -> Result<Self> {
        let config = Self {
            kernel,
            q_min,
            q_max,
            params,
            tol,
            format,
            mode,
        };
        config.validate()?;
        Ok(config)
    }

    /// Standard solver setup and level range for each kernel and mode.
    pub fn defaults(kernel: Kernel, mode: Mode) -> Self {
        let (q_min, q_max) = default_levels(kernel, mode);
        Self {
            kernel,
            q_min,
            q_max,
            params: SmootherParams::for_kernel(kernel),
            tol: SolverOptions::for_kernel(kernel).tol,
            format: Format::Table,
            mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_min < Q_MIN {
            return Err(BenchError::Config(format!("qmin must be at least {Q_MIN}")));
        }
        if self.q_max > Q_MAX {
            return Err(BenchError::Config(format!("qmax must be at most {Q_MAX}")));
        }
        if self.q_min > self.q_max {
            return Err(BenchError::Config("qmin exceeds qmax".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(BenchError::Config(format!(
                "tolerance {} is outside (0, 1)",
                self.tol
            )));
        }
        self.params.validate()?;
        Ok(())
    }

    pub fn levels(&self) -> RangeInclusive<u32> {
        self.q_min..=self.q_max
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            params: self.params,
            tol: self.tol,
            ..SolverOptions::for_kernel(self.kernel)
        }
    }
}

pub fn default_levels(kernel: Kernel, mode: Mode) -> (u32, u32) {
    match (mode, kernel) {
        (Mode::Convergence, Kernel::Fractional { .. }) => (9, 12),
        (Mode::Convergence, Kernel::Constant) => (11, 16),
        (Mode::Verify, _) => (3, 8),
        (Mode::Scaling, _) => (14, 18),
        (Mode::Validate, _) => (8, 8),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for kernel in [Kernel::fractional(1.3).unwrap(), Kernel::Constant] {
            for mode in [
                Mode::Convergence,
                Mode::Verify,
                Mode::Scaling,
                Mode::Validate,
            ] {
                StudyConfig::defaults(kernel, mode).validate().unwrap();
            }
        }
        let c = StudyConfig::defaults(Kernel::Constant, Mode::Convergence);
        assert_eq!(c.levels(), 11..=16);
        assert_eq!(c.tol, 1e-13);
        assert_eq!(c.params, SmootherParams::CONSTANT);
    }

    #[test]
    fn invariants_enforced() {
        let base = StudyConfig::defaults(Kernel::Constant, Mode::Convergence);
        let with = |f: fn(&mut StudyConfig)| {
            let mut c = base;
            f(&mut c);
            c.validate()
        };
        assert!(with(|c| c.q_min = 2).is_err());
        assert!(with(|c| c.q_max = 23).is_err());
        assert!(with(|c| c.q_min = 17).is_err());
        assert!(with(|c| c.tol = 0.0).is_err());
        assert!(with(|c| c.tol = 1.0).is_err());
        assert!(with(|c| c.params.omega_post = 2.0).is_err());
        assert!(with(|c| {
            c.q_min = 3;
            c.q_max = 22
        })
        .is_ok());
    }
}
