//! Property suites gathered behind one pass/fail report.

use std::fmt;

use clap::ValueEnum;
use nlmg::assembly::{assemble, Kernel, ProblemSpec};
use nlmg::dense::{galerkin_product, matvec};
use nlmg::multigrid::{
    closed_form_coarse_constant, closed_form_coarse_toeplitz, energy_contraction, galerkin_coarsen,
    level_jacobi_lambdas, theoretical_bound_with_eta0, Hierarchy,
};
use nlmg::spectral::{
    check_interlacing, coarse_psd_check, coefficient_property_check, det_identity_check,
    lambda_min_asymptotics,
};
use nlmg::structured::{SymmetricToeplitz, ToeplitzPlusTridiagonal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::StudyConfig;
use crate::error::{BenchError, Result};

/// Largest `q` the dense suites run at.
pub const VERIFY_MAX_Q: u32 = 8;
/// Random initial errors per contraction instance.
pub const CONTRACTION_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Suite {
    FftMatvec,
    Symmetry,
    GalerkinIdentity,
    ClosedForms,
    HierarchyStorage,
    CoefficientProperties,
    JacobiSpectrum,
    ContractionBound,
    Interlacing,
    MinEigenvalue,
    GapMatrix,
    CoarseGap,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::FftMatvec,
        Suite::Symmetry,
        Suite::GalerkinIdentity,
        Suite::ClosedForms,
        Suite::HierarchyStorage,
        Suite::CoefficientProperties,
        Suite::JacobiSpectrum,
        Suite::ContractionBound,
        Suite::Interlacing,
        Suite::MinEigenvalue,
        Suite::GapMatrix,
        Suite::CoarseGap,
    ];

    pub fn applies_to(self, kernel: Kernel) -> bool {
        match self {
            Suite::Interlacing | Suite::MinEigenvalue | Suite::GapMatrix | Suite::CoarseGap => {
                kernel == Kernel::Constant
            }
            _ => true,
        }
    }

    /// The operation a failure is attributed to.
    pub fn id(self) -> &'static str {
        match self {
            Suite::FftMatvec => "structured::ToeplitzPlusTridiagonal::apply",
            Suite::Symmetry => "assembly::assemble",
            Suite::GalerkinIdentity => "multigrid::galerkin_coarsen",
            Suite::ClosedForms => "multigrid::closed_form_coarse_toeplitz",
            Suite::HierarchyStorage => "multigrid::Hierarchy::stored_scalars",
            Suite::CoefficientProperties => "spectral::coefficient_property_check",
            Suite::JacobiSpectrum => "multigrid::level_jacobi_lambdas",
            Suite::ContractionBound => "multigrid::theoretical_bound",
            Suite::Interlacing => "spectral::check_interlacing",
            Suite::MinEigenvalue => "spectral::lambda_min_asymptotics",
            Suite::GapMatrix => "spectral::det_identity_check",
            Suite::CoarseGap => "spectral::coarse_psd_check",
        }
    }
}

pub fn default_suites(kernel: Kernel) -> Vec<Suite> {
    Suite::ALL
        .into_iter()
        .filter(|s| s.applies_to(kernel))
        .collect()
}

/// Test fixture: perturb the assembled operator before the suites see it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fault {
    /// Overwrite Toeplitz coefficient `index` with `value`.
    ToeplitzCoefficient { index: usize, value: f64 },
}

impl Fault {
    fn apply(self, a: ToeplitzPlusTridiagonal) -> Result<ToeplitzPlusTridiagonal> {
        let Fault::ToeplitzCoefficient { index, value } = self;
        let (scale, t, e) = a.into_parts();
        let mut c = t.coeffs().to_vec();
        if let Some(slot) = c.get_mut(index) {
            *slot = value;
        }
        Ok(ToeplitzPlusTridiagonal::new(
            scale,
            SymmetricToeplitz::new(c)?,
            e,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub id: &'static str,
    pub intervals: usize,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {} N={} {}",
            self.id, self.intervals, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub kernel: Kernel,
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

fn max_rel(got: &[f64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = got
        .iter()
        .zip(want)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if got.len() != want.len() {
        f64::INFINITY
    } else {
        diff / scale
    }
}

fn random_vectors(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

struct Instance {
    kernel: Kernel,
    intervals: usize,
    a: ToeplitzPlusTridiagonal,
    seed: u64,
}

type Check = (bool, String);

fn fft_matvec(inst: &Instance) -> Result<Check> {
    let dense = inst.a.to_dense()?;
    let mut worst = 0.0f64;
    for x in random_vectors(inst.a.n(), 3, inst.seed) {
        worst = worst.max(max_rel(&inst.a.apply(&x)?, &matvec(&dense, &x)));
    }
    Ok((
        worst <= 1e-12,
        format!("max relative difference {worst:.2e}"),
    ))
}

fn symmetry(inst: &Instance) -> Result<Check> {
    let v = random_vectors(inst.a.n(), 2, inst.seed);
    let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(a, b)| a * b).sum::<f64>();
    let xay = dot(&v[0], &inst.a.apply(&v[1])?);
    let yax = dot(&v[1], &inst.a.apply(&v[0])?);
    let rel = (xay - yax).abs() / xay.abs().max(yax.abs());
    Ok((rel <= 1e-12, format!("relative asymmetry {rel:.2e}")))
}

fn galerkin_identity(inst: &Instance) -> Result<Check> {
    let mut a = inst.a.clone();
    let mut worst = 0.0f64;
    while a.n() >= 3 {
        let coarse = galerkin_coarsen(&a)?;
        let dense = galerkin_product(&a.to_dense()?)?;
        let scale = dense.abs().max();
        worst = worst.max((coarse.to_dense()? - &dense).abs().max() / scale);
        a = coarse;
    }
    Ok((
        worst <= 1e-12,
        format!("max relative difference {worst:.2e}"),
    ))
}

/// Closed forms against repeated structured coarsening, normalized by
/// `8^{k-1}`.
fn closed_forms(inst: &Instance) -> Result<Check> {
    let c1 = inst.a.toeplitz().coeffs().to_vec();
    let mut t = ToeplitzPlusTridiagonal::toeplitz_only(1.0, SymmetricToeplitz::new(c1.clone())?)?;
    let mut worst = 0.0f64;
    let mut k = 1;
    while t.n() >= 3 {
        t = galerkin_coarsen(&t)?;
        k += 1;
        let recursive: Vec<f64> = t
            .toeplitz()
            .coeffs()
            .iter()
            .map(|v| v * 8f64.powi(k as i32 - 1))
            .collect();
        worst = worst.max(max_rel(&closed_form_coarse_toeplitz(&c1, k)?, &recursive));
        if inst.kernel == Kernel::Constant {
            worst = worst.max(max_rel(
                &closed_form_coarse_constant(inst.intervals, k)?,
                &recursive,
            ));
        }
    }
    Ok((
        worst <= 1e-10,
        format!("max relative difference {worst:.2e} over {k} levels"),
    ))
}

fn hierarchy_storage(h: &Hierarchy) -> Check {
    let total = h.stored_scalars();
    let finest = h.level(0).stored_scalars();
    (
        total <= 4 * finest,
        format!("{total} scalars, finest level {finest}"),
    )
}

fn coefficient_properties(inst: &Instance) -> Result<Check> {
    let report = coefficient_property_check(&inst.a, inst.kernel)?;
    let mut detail = format!(
        "lambda_max(D^-1 A) = {:.6}, dominance margin {:.3e}",
        report.lambda_max, report.min_dominance_margin
    );
    if !report.passed() {
        detail += &format!("; {} violation(s)", report.violations.len());
        for v in report.violations.iter().take(5) {
            match v.at {
                Some((i, j)) => {
                    detail += &format!("; {:?} at ({i}, {j}): {:.3e}", v.property, v.value)
                }
                None => detail += &format!("; {:?}: {:.3e}", v.property, v.value),
            }
        }
    }
    Ok((report.passed(), detail))
}

fn jacobi_spectrum(inst: &Instance, h: &Hierarchy) -> Result<Check> {
    let lambdas = level_jacobi_lambdas(h)?;
    let upper = inst.kernel.eta0_bound();
    let ok = lambdas.iter().all(|&l| l >= 1.0 - 1e-12 && l < upper);
    let max = lambdas.iter().copied().fold(0.0, f64::max);
    Ok((
        ok,
        format!("max over {} levels {max:.6} (< {upper})", lambdas.len()),
    ))
}

fn contraction_bound(inst: &Instance, h: &Hierarchy) -> Result<Check> {
    let eta0 = level_jacobi_lambdas(h)?.into_iter().fold(0.0, f64::max);
    let omega = h.params().omega_post;
    let bound = theoretical_bound_with_eta0(inst.kernel, omega, eta0)?;
    let errors = random_vectors(h.n(), CONTRACTION_SAMPLES, inst.seed);
    let worst = energy_contraction(h, &errors)?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((
        worst <= bound,
        format!("worst contraction {worst:.4} <= bound {bound:.4}"),
    ))
}

fn interlacing(n: usize) -> Result<Check> {
    let r = check_interlacing(n)?;
    Ok((
        r.passed(),
        format!("{} violation(s)", r.bound_violations.len()),
    ))
}

fn min_eigenvalue(n: usize) -> Result<Check> {
    let r = lambda_min_asymptotics(n)?;
    let closed = (r.rayleigh - r.rayleigh_closed_form).abs() <= 1e-12;
    // the asymptotic constant is only claimed once N is large
    let asymptotic = n < 1024 || (r.scaled - 1.0).abs() <= 0.05;
    Ok((
        r.rayleigh_bound_holds() && closed && asymptotic,
        format!(
            "lambda_min N sqrt(3) = {:.5}, Rayleigh quotient {:.6e}",
            r.scaled, r.rayleigh
        ),
    ))
}

fn gap_matrix(n: usize) -> Result<Check> {
    let mut ok = true;
    let mut detail = String::new();
    // the odd neighbour exercises the other branch of phi
    for m in [n, n + 1] {
        let r = det_identity_check(m)?;
        ok &= r.passed();
        detail += &format!("phi({m}) = {} (psd: {}); ", r.phi_exact, r.psd());
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

fn coarse_gap(n: usize) -> Result<Check> {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut k = 2;
    while n >> (k - 1) >= 4 {
        let r = coarse_psd_check(n, k)?;
        ok &= r.psd() && r.rescale_error <= 1e-12;
        worst = worst.max(r.rescale_error);
        k += 1;
    }
    Ok((
        ok,
        format!("levels 2..{}, rescaling error {worst:.2e}", k - 1),
    ))
}

/// Run the selected suites at every `N = 2^q` with `q` in the configured
/// range, capped at [`VERIFY_MAX_Q`]. Suites that do not apply to the kernel
/// are skipped.
pub fn run_verify(
    config: &StudyConfig,
    suites: &[Suite],
    fault: Option<Fault>,
) -> Result<VerifyReport> {
    config.validate()?;
    let kernel = config.kernel;
    let selected: Vec<Suite> = Suite::ALL
        .into_iter()
        .filter(|s| suites.contains(s) && s.applies_to(kernel))
        .collect();
    if selected.is_empty() {
        return Err(BenchError::NoSuites);
    }
    let q_max = config.q_max.min(VERIFY_MAX_Q);
    let mut outcomes = Vec::new();
    for q in config.q_min..=q_max {
        let spec = ProblemSpec::new(kernel, q)?;
        let intervals = spec.intervals();
        let mut a = assemble(&spec)?;
        if let Some(fault) = fault {
            a = fault.apply(a)?;
        }
        let inst = Instance {
            kernel,
            intervals,
            seed: q as u64,
            a,
        };
        let h = Hierarchy::new(inst.a.clone(), config.params)?;
        for &suite in &selected {
            let result = match suite {
                Suite::FftMatvec => fft_matvec(&inst),
                Suite::Symmetry => symmetry(&inst),
                Suite::GalerkinIdentity => galerkin_identity(&inst),
                Suite::ClosedForms => closed_forms(&inst),
                Suite::HierarchyStorage => Ok(hierarchy_storage(&h)),
                Suite::CoefficientProperties => coefficient_properties(&inst),
                Suite::JacobiSpectrum => jacobi_spectrum(&inst, &h),
                Suite::ContractionBound => contraction_bound(&inst, &h),
                Suite::Interlacing => interlacing(intervals),
                Suite::MinEigenvalue => min_eigenvalue(intervals),
                Suite::GapMatrix => gap_matrix(intervals),
                Suite::CoarseGap => coarse_gap(intervals),
            };
            // an operation refusing its input is a failure of that suite
            let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
            outcomes.push(CheckOutcome {
                suite,
                id: suite.id(),
                intervals,
                passed,
                detail,
            });
        }
    }
    Ok(VerifyReport { kernel, outcomes })
}
