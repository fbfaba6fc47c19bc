//! End-to-end check of the multigrid solve against a dense factorization.

use nlmg::assembly::{assemble, load_vector, manufactured, ProblemSpec};
use nlmg::dense::cholesky_solve;
use nlmg::multigrid::{iterate, Hierarchy, DEFAULT_MAX_ITERATIONS};

use crate::config::StudyConfig;
use crate::error::{BenchError, Result};

/// Largest `N` solved densely.
pub const VALIDATE_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateRow {
    pub intervals: usize,
    /// `max |u_mg - u_dense|`.
    pub difference: f64,
    /// `10 tol ||u_dense||_inf`.
    pub bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub dense: Vec<f64>,
    pub multigrid: Vec<f64>,
}

impl ValidateRow {
    pub fn passed(&self) -> bool {
        self.converged && self.difference <= self.bound
    }

    /// Both solutions side by side, one node per line.
    pub fn dump(&self) -> String {
        let mut s = String::from("i dense multigrid\n");
        for (i, (d, m)) in self.dense.iter().zip(&self.multigrid).enumerate() {
            s += &format!("{} {d:.17e} {m:.17e}\n", i + 1);
        }
        s
    }
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |m, x| m.max(x.abs()))
}

pub fn run_validate(config: &StudyConfig) -> Result<Vec<ValidateRow>> {
    config.validate()?;
    let n_max = 1usize << config.q_max;
    if n_max > VALIDATE_CAP {
        return Err(BenchError::AboveCap {
            n: n_max,
            cap: VALIDATE_CAP,
        });
    }
    let mut rows = Vec::new();
    for q in config.levels() {
        let spec = ProblemSpec::new(config.kernel, q)?;
        let exact = manufactured(&spec);
        let f = load_vector(&spec, |x| exact.f(x))?;
        let a = assemble(&spec)?;
        let dense = cholesky_solve(&a.to_dense()?, &f)?;
        let h = Hierarchy::new(a, config.params)?;
        let (multigrid, report, converged) = iterate(&h, &f, config.tol, DEFAULT_MAX_ITERATIONS)?;
        let difference = max_abs(dense.iter().zip(&multigrid).map(|(d, m)| d - m));
        rows.push(ValidateRow {
            intervals: spec.intervals(),
            difference,
            bound: 10.0 * config.tol * max_abs(dense.iter().copied()),
            iterations: report.iterations,
            converged,
            dense,
            multigrid,
        });
    }
    Ok(rows)
}

pub fn render_validate(rows: &[ValidateRow]) -> String {
    let mut s = format!(
        "{:>9} {:>13} {:>13} {:>6} {:>6}\n",
        "N", "difference", "bound", "iter", "ok"
    );
    for r in rows {
        s += &format!(
            "{:>9} {:>13.4e} {:>13.4e} {:>6} {:>6}\n",
            format!("2^{}", r.intervals.trailing_zeros()),
            r.difference,
            r.bound,
            r.iterations,
            if r.passed() { "yes" } else { "NO" }
        );
    }
    s
}
