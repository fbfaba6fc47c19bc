//! Transfer operators, structured Galerkin coarsening, damped Jacobi and the
//! V-cycle solver.

mod bounds;
mod coarsening;
mod hierarchy;
mod smoother;
mod transfer;

use std::time::Instant;

pub use bounds::{
    energy_contraction, energy_norm_dense, level_jacobi_lambdas, theoretical_bound,
    theoretical_bound_with_eta0,
};
pub use coarsening::{
    c_k, closed_form_coarse_constant, closed_form_coarse_toeplitz, galerkin_coarsen,
};
pub use hierarchy::{v_cycle, Hierarchy, COARSEST_DENSE_CAP};
pub use smoother::{jacobi_sweep, positive_diagonal, SmootherParams};
pub use transfer::{prolong, restrict};

use crate::assembly::{
    assemble, load_vector_with, manufactured, Kernel, LoadQuadrature, ProblemSpec,
};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITERATIONS: usize = 500;

/// Outcome of an iterative solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `||r_i|| / ||r_0||` after each cycle.
    pub residual_history: Vec<f64>,
    /// Max-norm error at the mesh points, when an exact solution is known.
    pub error_inf: Option<f64>,
    /// Wall time of hierarchy setup plus iterations.
    pub seconds: f64,
}

/// Everything [`solve_with`] needs besides the problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub params: SmootherParams,
    pub tol: f64,
    pub max_iterations: usize,
    /// Coarsening stops once a level has at most this many unknowns.
    pub coarsest_max: usize,
    pub load: LoadQuadrature,
}

impl SolverOptions {
    /// Tolerance `1e-10` (fractional) or `1e-13` (constant), `(1, 2)` sweeps.
    pub fn for_kernel(kernel: Kernel) -> Self {
        let tol = match kernel {
            Kernel::Fractional { .. } => 1e-10,
            Kernel::Constant => 1e-13,
        };
        Self {
            params: SmootherParams::for_kernel(kernel),
            tol,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            coarsest_max: 1,
            load: LoadQuadrature::default(),
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Repeat V-cycles from zero until `||r|| / ||r_0|| < tol`.
pub fn solve_system(
    h: &Hierarchy,
    f: &[f64],
    tol: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    match iterate(h, f, tol, max_iterations)? {
        (x, report, true) => Ok((x, report)),
        (_, report, false) => Err(Error::NotConverged(Box::new(report))),
    }
}

/// The loop behind [`solve_system`], returning the last iterate even when
/// the tolerance was not reached; the flag tells which.
pub fn iterate(
    h: &Hierarchy,
    f: &[f64],
    tol: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, SolveReport, bool)> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let start = Instant::now();
    let mut x = vec![0.0; h.n()];
    let r0 = norm2(f);
    let mut report = SolveReport {
        iterations: 0,
        residual_history: Vec::new(),
        error_inf: None,
        seconds: 0.0,
    };
    if r0 == 0.0 {
        report.residual_history.push(0.0);
        return Ok((x, report, true));
    }
    while report.iterations < max_iterations {
        x = h.v_cycle(f, &x)?;
        report.iterations += 1;
        let rel = norm2(&h.finest().residual(&x, f)?) / r0;
        report.residual_history.push(rel);
        if rel < tol {
            report.seconds = start.elapsed().as_secs_f64();
            return Ok((x, report, true));
        }
        if !rel.is_finite() || rel > 1e12 {
            break;
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    Ok((x, report, false))
}

/// Assemble, build the hierarchy and solve the manufactured problem with the
/// default coarsening depth and iteration cap.
pub fn solve(
    spec: &ProblemSpec,
    params: SmootherParams,
    tol: f64,
) -> Result<(Vec<f64>, SolveReport)> {
    let options = SolverOptions {
        params,
        tol,
        ..SolverOptions::for_kernel(spec.kernel())
    };
    solve_with(spec, &options)
}

/// As [`solve`], with every knob exposed. A non-converged solve still
/// reports the max-norm error of its last iterate.
pub fn solve_with(spec: &ProblemSpec, options: &SolverOptions) -> Result<(Vec<f64>, SolveReport)> {
    let exact = manufactured(spec);
    let f = load_vector_with(spec, |x| exact.f(x), options.load)?;
    let start = Instant::now();
    let h = Hierarchy::with_coarsest(assemble(spec)?, options.params, options.coarsest_max)?;
    let setup = start.elapsed().as_secs_f64();
    let u = exact.u_nodes(spec);
    let max_err = |x: &[f64]| {
        x.iter()
            .zip(&u)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    };
    let (x, mut report, converged) = iterate(&h, &f, options.tol, options.max_iterations)?;
    report.error_inf = Some(max_err(&x));
    report.seconds += setup;
    if converged {
        Ok((x, report))
    } else {
        Err(Error::NotConverged(Box::new(report)))
    }
}

/// `log2(e_coarse / e_fine)`.
pub fn convergence_rate(error_coarse: f64, error_fine: f64) -> f64 {
    (error_coarse / error_fine).log2()
}
