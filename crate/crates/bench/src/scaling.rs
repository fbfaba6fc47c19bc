//! Wall-time growth of the V-cycle and of the structured matvec.

use std::time::Instant;

use nlmg::assembly::{assemble, ProblemSpec};
use nlmg::multigrid::Hierarchy;
use nlmg::structured::PreparedOperator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::StudyConfig;
use crate::error::Result;

/// Largest acceptable time ratio per doubling of `N`.
pub const DOUBLING_BOUND: f64 = 2.5;
/// Smallest plausible ratio; below it the timer is measuring noise.
pub const DOUBLING_FLOOR: f64 = 1.5;
pub const REPETITIONS: usize = 3;
/// Each repetition covers at least this many unknowns' worth of work, so
/// small sizes run several cycles and report the mean per cycle.
const WORK_PER_REPETITION: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub intervals: usize,
    pub seconds_per_cycle: f64,
    /// Time over the previous row's time.
    pub ratio: Option<f64>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Median over [`REPETITIONS`] of the per-call time of `f`, after one
/// discarded warmup call.
pub fn time_per_call(intervals: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    let batch = (WORK_PER_REPETITION / intervals).max(1);
    f()?;
    let mut times = Vec::with_capacity(REPETITIONS);
    for _ in 0..REPETITIONS {
        let start = Instant::now();
        for _ in 0..batch {
            f()?;
        }
        times.push(start.elapsed().as_secs_f64() / batch as f64);
    }
    Ok(median(times))
}

fn with_ratios(times: Vec<(usize, f64)>) -> Vec<ScalingRow> {
    let mut rows: Vec<ScalingRow> = Vec::with_capacity(times.len());
    for (intervals, seconds_per_cycle) in times {
        let ratio = rows.last().map(|p| seconds_per_cycle / p.seconds_per_cycle);
        rows.push(ScalingRow {
            intervals,
            seconds_per_cycle,
            ratio,
        });
    }
    rows
}

fn random_rhs(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Per-V-cycle wall time at every `N = 2^q` in the range.
pub fn run_scaling(config: &StudyConfig) -> Result<Vec<ScalingRow>> {
    config.validate()?;
    let mut times = Vec::new();
    for q in config.levels() {
        let spec = ProblemSpec::new(config.kernel, q)?;
        let h = Hierarchy::new(assemble(&spec)?, config.params)?;
        let f = random_rhs(h.n());
        let mut x = vec![0.0; h.n()];
        let t = time_per_call(spec.intervals(), || {
            x = h.v_cycle(&f, &x)?;
            Ok(())
        })?;
        times.push((spec.intervals(), t));
    }
    Ok(with_ratios(times))
}

/// Per-matvec wall time of the finest operator at every `N = 2^q`.
pub fn run_matvec_scaling(config: &StudyConfig) -> Result<Vec<ScalingRow>> {
    config.validate()?;
    let mut times = Vec::new();
    for q in config.levels() {
        let spec = ProblemSpec::new(config.kernel, q)?;
        let a = PreparedOperator::new(assemble(&spec)?);
        let x = random_rhs(a.n());
        let t = time_per_call(spec.intervals(), || {
            std::hint::black_box(a.apply(&x)?);
            Ok(())
        })?;
        times.push((spec.intervals(), t));
    }
    Ok(with_ratios(times))
}

/// Every doubling ratio is at most [`DOUBLING_BOUND`].
pub fn scaling_passed(rows: &[ScalingRow]) -> bool {
    rows.iter()
        .filter_map(|r| r.ratio)
        .all(|r| r <= DOUBLING_BOUND)
}

pub fn render_scaling(rows: &[ScalingRow]) -> String {
    let mut s = format!("{:>9} {:>16} {:>8}\n", "N", "seconds/cycle", "ratio");
    for r in rows {
        let ratio = r.ratio.map_or("-".into(), |v| format!("{v:.3}"));
        s += &format!(
            "{:>9} {:>16.4e} {:>8}\n",
            format!("2^{}", r.intervals.trailing_zeros()),
            r.seconds_per_cycle,
            ratio
        );
    }
    s
}
