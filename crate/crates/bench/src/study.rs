//! Discretization-error studies over a range of mesh sizes.

use nlmg::assembly::{Kernel, ProblemSpec};
use nlmg::multigrid::{convergence_rate, solve_with};

use crate::config::StudyConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub kernel: Kernel,
    /// Number of mesh intervals `N`.
    pub intervals: usize,
    pub levels: u32,
    pub error_inf: f64,
    /// `log2` of the previous row's error over this one; `None` on the first
    /// row.
    pub rate: Option<f64>,
    pub iterations: usize,
    pub seconds: f64,
}

/// A row whose solve did not reach the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    pub intervals: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<StudyRow>,
    pub flagged: Vec<Flag>,
}

impl ConvergenceStudy {
    pub fn passed(&self) -> bool {
        self.flagged.is_empty()
    }

    pub fn is_flagged(&self, intervals: usize) -> bool {
        self.flagged.iter().any(|f| f.intervals == intervals)
    }
}

/// Levels built by coarsening `n` unknowns down to at most `coarsest_max`.
pub fn hierarchy_depth(mut n: usize, coarsest_max: usize) -> u32 {
    let mut depth = 1;
    while n > coarsest_max.max(1) && n >= 3 && n % 2 == 1 {
        n = (n - 1) / 2;
        depth += 1;
    }
    depth
}

/// Solve the manufactured problem at every `N = 2^q` in the range.
/// Solves that stall are kept, with the error of their last iterate, and
/// flagged; the study carries on.
pub fn run_convergence(config: &StudyConfig) -> Result<ConvergenceStudy> {
    config.validate()?;
    let options = config.solver_options();
    let mut rows = Vec::new();
    let mut flagged = Vec::new();
    let mut prev = None;
    for q in config.levels() {
        let spec = ProblemSpec::new(config.kernel, q)?;
        let (report, flag) = match solve_with(&spec, &options) {
            Ok((_, report)) => (report, None),
            Err(nlmg::Error::NotConverged(report)) => {
                let last = report.residual_history.last().copied().unwrap_or(f64::NAN);
                let msg = format!(
                    "no convergence in {} iterations (relative residual {last:.3e})",
                    report.iterations
                );
                (*report, Some(msg))
            }
            Err(e) => return Err(e.into()),
        };
        let intervals = spec.intervals();
        let error_inf = report.error_inf.unwrap_or(f64::NAN);
        if let Some(message) = flag {
            flagged.push(Flag { intervals, message });
        }
        if !(error_inf.is_finite() && error_inf > 0.0) {
            flagged.push(Flag {
                intervals,
                message: format!("unusable error {error_inf}"),
            });
            // no row, so the next one has no neighbour to take a rate against
            prev = None;
            continue;
        }
        rows.push(StudyRow {
            kernel: config.kernel,
            intervals,
            levels: hierarchy_depth(spec.unknowns(), options.coarsest_max),
            error_inf,
            rate: prev.map(|p| convergence_rate(p, error_inf)),
            iterations: report.iterations,
            seconds: report.seconds,
        });
        prev = Some(error_inf);
    }
    Ok(ConvergenceStudy { rows, flagged })
}

/// Largest deviation of a reported rate from `log2(prev / error)` of the
/// adjacent rows.
pub fn rate_consistency(rows: &[StudyRow]) -> f64 {
    rows.windows(2)
        .filter_map(|w| {
            w[1].rate
                .map(|r| (r - convergence_rate(w[0].error_inf, w[1].error_inf)).abs())
        })
        .fold(0.0, f64::max)
}
