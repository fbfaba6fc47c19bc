//! Finest-level stiffness matrices, load vectors and manufactured solutions
//! for the fractional and constant kernels on `(0, b)` with linear elements.

use std::f64::consts::PI;
use std::fmt;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::{graded_breakpoints, Toward, UnitRule};
use crate::structured::{SymmetricToeplitz, SymmetricTridiagonal, ToeplitzPlusTridiagonal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `C_alpha / |x - y|^{1 + alpha}` with `1 < alpha < 2`.
    Fractional { alpha: f64 },
    /// `J = 1`.
    Constant,
}

impl Kernel {
    pub fn fractional(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Kernel::Fractional { alpha })
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Kernel::Fractional { alpha } => Some(alpha),
            Kernel::Constant => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Fractional { .. } => "fractional",
            Kernel::Constant => "constant",
        }
    }

    /// Gerschgorin-type bound on `lambda_max(D^{-1} A)`: 2 for the
    /// fractional kernel, 3 for the constant one.
    pub fn eta0_bound(&self) -> f64 {
        match self {
            Kernel::Fractional { .. } => 2.0,
            Kernel::Constant => 3.0,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Fractional { alpha } => write!(f, "fractional(alpha={alpha})"),
            Kernel::Constant => f.write_str("constant"),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// A uniform mesh of `(0, b)` with `N` intervals and `N - 1` unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    kernel: Kernel,
    b: f64,
    intervals: usize,
}

impl ProblemSpec {
    pub const DEFAULT_LENGTH: f64 = 2.0;

    /// `N = 2^q` intervals, `q >= 2`.
    pub fn new(kernel: Kernel, q: u32) -> Result<Self> {
        if !(2..=30).contains(&q) {
            return Err(Error::InvalidProblem(format!(
                "levels q = {q} outside [2, 30]"
            )));
        }
        Self::with_intervals(kernel, 1usize << q)
    }

    /// Any `N >= 2`; used by the spectral checks, which also need odd `N`.
    pub fn with_intervals(kernel: Kernel, intervals: usize) -> Result<Self> {
        if let Kernel::Fractional { alpha } = kernel {
            check_alpha(alpha)?;
        }
        if intervals < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least 2 intervals, got {intervals}"
            )));
        }
        Ok(Self {
            kernel,
            b: Self::DEFAULT_LENGTH,
            intervals,
        })
    }

    pub fn with_length(mut self, b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "domain length {b} must be positive"
            )));
        }
        self.b = b;
        Ok(self)
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// `n = N - 1`.
    pub fn unknowns(&self) -> usize {
        self.intervals - 1
    }

    pub fn h(&self) -> f64 {
        self.b / self.intervals as f64
    }

    /// `q` when `N = 2^q`.
    pub fn levels(&self) -> Option<u32> {
        self.intervals
            .is_power_of_two()
            .then(|| self.intervals.trailing_zeros())
    }

    /// Interior mesh points `x_1, .., x_{N-1}`.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        (1..self.intervals).map(|i| i as f64 * h).collect()
    }
}

/// Constants of the fractional kernel for a given order and mesh width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalConstants {
    pub c_alpha: f64,
    pub kappa: f64,
    /// `kappa / (h^{alpha - 1} Gamma(4 - alpha))`.
    pub prefactor: f64,
}

impl FractionalConstants {
    pub fn new(alpha: f64, h: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let kappa = -1.0 / (2.0 * (alpha * PI / 2.0).cos());
        let c_alpha = kappa * -alpha / gamma(1.0 - alpha);
        let prefactor = kappa / (h.powf(alpha - 1.0) * gamma(4.0 - alpha));
        Ok(Self {
            c_alpha,
            kappa,
            prefactor,
        })
    }
}

// Below this argument the defining finite differences are accurate; above it
// they cancel catastrophically and the binomial series takes over.
const SERIES_THRESHOLD: f64 = 8.0;
const SERIES_MAX_TERMS: usize = 200;

/// Generalized binomial coefficient `binom(p, k)`.
fn gbinom(p: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (p - j as f64) / (j + 1) as f64)
}

fn sum_series(mut term: impl FnMut(usize) -> f64, start: usize) -> f64 {
    let mut sum = 0.0;
    for k in start..start + SERIES_MAX_TERMS {
        let t = term(k);
        sum += t;
        if t.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `-(m+2)^p + 4(m+1)^p - 6m^p + 4(m-1)^p - (m-2)^p` for `m >= 2`.
fn fourth_difference(p: f64, m: usize) -> f64 {
    let x = m as f64;
    if x < SERIES_THRESHOLD {
        return -(x + 2.0).powf(p) + 4.0 * (x + 1.0).powf(p) - 6.0 * x.powf(p)
            + 4.0 * (x - 1.0).powf(p)
            - (x - 2.0).powf(p);
    }
    let inv2 = x.powi(-2);
    let s = sum_series(
        |n| gbinom(p, 2 * n) * (2f64.powi(2 * n as i32 + 1) - 8.0) * inv2.powi(n as i32),
        2,
    );
    -x.powf(p) * s
}

/// `(i+1)^p - 2p i^{p-1} - (i-1)^p`.
fn diag_term(p: f64, i: usize) -> f64 {
    let x = i as f64;
    if x < SERIES_THRESHOLD {
        let left = if i == 0 { 0.0 } else { (x - 1.0).powf(p) };
        return (x + 1.0).powf(p) - 2.0 * p * x.powf(p - 1.0) - left;
    }
    let inv2 = x.powi(-2);
    2.0 * x.powf(p - 1.0) * sum_series(|n| gbinom(p, 2 * n + 1) * inv2.powi(n as i32), 1)
}

/// `-2[(i+1)^p - i^p] + p[(i+1)^{p-1} + i^{p-1}]`.
fn off_term(p: f64, i: usize) -> f64 {
    let x = i as f64;
    if x < SERIES_THRESHOLD {
        return -2.0 * ((x + 1.0).powf(p) - x.powf(p))
            + p * ((x + 1.0).powf(p - 1.0) + x.powf(p - 1.0));
    }
    let inv = x.recip();
    x.powf(p - 1.0)
        * sum_series(
            |k| (k as f64 - 1.0) * gbinom(p, k + 1) * inv.powi(k as i32),
            2,
        )
}

/// First column `c_0 .. c_{n-1}` of the fractional Toeplitz part.
pub fn fractional_toeplitz_coeffs(alpha: f64, n: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let p = 3.0 - alpha;
    Ok((0..n)
        .map(|m| match m {
            0 => 8.0 - 2f64.powf(4.0 - alpha),
            1 => -7.0 - 3f64.powf(3.0 - alpha) + 2f64.powf(5.0 - alpha),
            _ => fourth_difference(p, m),
        })
        .collect())
}

/// Boundary correction `E`: diagonal `b~_{i,i}` for `i = 1..N-1` and
/// off-diagonal `b~_{i,i+1}` for `i = 1..N-2`.
pub fn fractional_boundary_terms(alpha: f64, intervals: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_alpha(alpha)?;
    let p = 3.0 - alpha;
    let big_n = intervals;
    let diag = (1..big_n)
        .map(|i| 2.0 * diag_term(p, i) + 2.0 * diag_term(p, big_n - i))
        .collect();
    let off = (1..big_n.saturating_sub(1))
        .map(|i| off_term(p, i) + off_term(p, big_n - i - 1))
        .collect();
    Ok((diag, off))
}

/// `[2N/3 - 1, N/6 - 1, -1, .., -1]`, `N - 1` entries.
pub fn constant_coeffs(intervals: usize) -> Vec<f64> {
    let big_n = intervals as f64;
    let mut c = vec![-1.0; intervals - 1];
    c[0] = 2.0 * big_n / 3.0 - 1.0;
    if let Some(c1) = c.get_mut(1) {
        *c1 = big_n / 6.0 - 1.0;
    }
    c
}

pub fn assemble(spec: &ProblemSpec) -> Result<ToeplitzPlusTridiagonal> {
    match spec.kernel {
        Kernel::Fractional { .. } => assemble_fractional(spec),
        Kernel::Constant => assemble_constant(spec),
    }
}

pub fn assemble_fractional(spec: &ProblemSpec) -> Result<ToeplitzPlusTridiagonal> {
    let Kernel::Fractional { alpha } = spec.kernel else {
        return Err(Error::InvalidProblem(
            "fractional assembly needs the fractional kernel".into(),
        ));
    };
    let consts = FractionalConstants::new(alpha, spec.h())?;
    let coeffs = fractional_toeplitz_coeffs(alpha, spec.unknowns())?;
    let (diag, off) = fractional_boundary_terms(alpha, spec.intervals)?;
    ToeplitzPlusTridiagonal::new(
        consts.prefactor,
        SymmetricToeplitz::new(coeffs)?,
        SymmetricTridiagonal::new(diag, off)?,
    )
}

pub fn assemble_constant(spec: &ProblemSpec) -> Result<ToeplitzPlusTridiagonal> {
    if spec.kernel != Kernel::Constant {
        return Err(Error::InvalidProblem(
            "constant assembly needs the constant kernel".into(),
        ));
    }
    let h = spec.h();
    ToeplitzPlusTridiagonal::toeplitz_only(
        h * h,
        SymmetricToeplitz::new(constant_coeffs(spec.intervals))?,
    )
}

/// Quadrature used for `(f, phi_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadQuadrature {
    /// Gauss–Legendre points per (sub)element.
    pub points: usize,
    /// Dyadic refinements of the two boundary elements toward the domain ends.
    pub boundary_levels: u32,
}

impl Default for LoadQuadrature {
    fn default() -> Self {
        Self {
            points: 16,
            boundary_levels: 8,
        }
    }
}

pub fn load_vector(spec: &ProblemSpec, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    load_vector_with(spec, f, LoadQuadrature::default())
}

/// `(f, phi_j)` for `j = 1..N-1`, element by element.
pub fn load_vector_with(
    spec: &ProblemSpec,
    f: impl Fn(f64) -> f64,
    quad: LoadQuadrature,
) -> Result<Vec<f64>> {
    let big_n = spec.intervals;
    let h = spec.h();
    let rule = UnitRule::new(quad.points);
    let mut load = vec![0.0; big_n - 1];
    for e in 0..big_n {
        let pieces = if e == 0 {
            graded_breakpoints(0.0, 1.0, quad.boundary_levels, Toward::Left)
        } else if e == big_n - 1 {
            graded_breakpoints(0.0, 1.0, quad.boundary_levels, Toward::Right)
        } else {
            vec![0.0, 1.0]
        };
        // local coordinate t in [0, 1]; phi_e = 1 - t, phi_{e+1} = t
        let (mut left, mut right) = (0.0, 0.0);
        for piece in pieces.windows(2) {
            for (t, w) in rule.mapped(piece[0], piece[1]) {
                let x = (e as f64 + t) * h;
                let value = f(x);
                if !value.is_finite() {
                    return Err(Error::NonFiniteSource { x, value });
                }
                left += w * value * (1.0 - t);
                right += w * value * t;
            }
        }
        if e >= 1 {
            load[e - 1] += h * left;
        }
        if e + 1 < big_n {
            load[e] += h * right;
        }
    }
    Ok(load)
}

/// Exact solution `u(x) = x^2 (b - x)^2` and its source term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    kernel: Kernel,
    b: f64,
    weights: [f64; 3],
}

pub fn manufactured(spec: &ProblemSpec) -> Manufactured {
    let b = spec.b;
    let weights = match spec.kernel {
        Kernel::Fractional { alpha: a } => {
            let k = -1.0 / (2.0 * (a * PI / 2.0).cos());
            [
                k * a * (a - 5.0) * (a * a - 5.0 * a + 10.0) / gamma(5.0 - a),
                2.0 * b * k * a * (a * a - 6.0 * a + 11.0) / gamma(4.0 - a),
                -b * b * k * a * (3.0 - a) / gamma(3.0 - a),
            ]
        }
        Kernel::Constant => [0.0; 3],
    };
    Manufactured {
        kernel: spec.kernel,
        b,
        weights,
    }
}

impl Manufactured {
    pub fn u(&self, x: f64) -> f64 {
        x * x * (self.b - x) * (self.b - x)
    }

    pub fn f(&self, x: f64) -> f64 {
        let b = self.b;
        match self.kernel {
            Kernel::Fractional { alpha } => {
                let y = b - x;
                let [w4, w3, w2] = self.weights;
                w4 * (x.powf(4.0 - alpha) + y.powf(4.0 - alpha))
                    + w3 * (x.powf(3.0 - alpha) + y.powf(3.0 - alpha))
                    + w2 * (x.powf(2.0 - alpha) + y.powf(2.0 - alpha))
            }
            Kernel::Constant => b * self.u(x) - b.powi(5) / 30.0,
        }
    }

    /// `u` at the interior mesh points.
    pub fn u_nodes(&self, spec: &ProblemSpec) -> Vec<f64> {
        spec.nodes().into_iter().map(|x| self.u(x)).collect()
    }
}

/// Largest `N` the quadrature oracle accepts.
pub const ORACLE_MAX_INTERVALS: usize = 64;

/// Values of a hat function at the two ends of element `e` (unit mesh).
fn hat_on_element(node: usize, e: usize) -> (f64, f64) {
    ((node == e) as u8 as f64, (node == e + 1) as u8 as f64)
}

/// `a(phi_i, phi_j)` for the fractional kernel by direct integration of
/// `(C/2) * int int (phi_i(x) - phi_i(y))(phi_j(x) - phi_j(y)) |x - y|^{-1-alpha}`
/// over `(0, b)^2`. Indices are 1-based interior nodes.
pub fn quadrature_entry_oracle(i: usize, j: usize, spec: &ProblemSpec) -> Result<f64> {
    let Kernel::Fractional { alpha } = spec.kernel else {
        return Err(Error::InvalidProblem(
            "the quadrature oracle is for the fractional kernel".into(),
        ));
    };
    let big_n = spec.intervals;
    if big_n > ORACLE_MAX_INTERVALS {
        return Err(Error::OracleTooLarge {
            n: big_n,
            limit: ORACLE_MAX_INTERVALS,
        });
    }
    for idx in [i, j] {
        if idx == 0 || idx >= big_n {
            return Err(Error::InvalidProblem(format!(
                "node {idx} outside 1..={}",
                big_n - 1
            )));
        }
    }
    let consts = FractionalConstants::new(alpha, spec.h())?;
    let rule = UnitRule::new(16);
    let touches = |node: usize, e: usize| e + 1 == node || e == node;

    let mut total = 0.0;
    for k in 0..big_n {
        // same element: the differences are slope * (s - t)
        let (li, ri) = hat_on_element(i, k);
        let (lj, rj) = hat_on_element(j, k);
        total += (ri - li) * (rj - lj) * 2.0 / ((2.0 - alpha) * (3.0 - alpha));

        for l in k + 1..big_n {
            let relevant = |node| touches(node, k) || touches(node, l);
            if !relevant(i) || !relevant(j) {
                continue;
            }
            total += 2.0 * element_pair(alpha, i, j, k, l, &rule);
        }
    }
    Ok(0.5 * consts.c_alpha * spec.h().powf(1.0 - alpha) * total)
}

/// Integral over `s in [k, k+1]`, `t in [l, l+1]`, `l > k`, with the inner
/// `t` integral done in closed form.
fn element_pair(alpha: f64, i: usize, j: usize, k: usize, l: usize, rule: &UnitRule) -> f64 {
    let adjacent = l == k + 1;
    let parts = |node: usize| {
        let (lk, rk) = hat_on_element(node, k);
        let (ll, rl) = hat_on_element(node, l);
        (lk, rk - lk, ll, rl - ll)
    };
    let (ai0, si_k, bi0, si_l) = parts(i);
    let (aj0, sj_k, bj0, sj_l) = parts(j);
    // D(s, u) = A(s) - q u with u = t - s
    let a_of = |s: f64, a0: f64, sk: f64, b0: f64, sl: f64| {
        if adjacent {
            (sk - sl) * (s - l as f64)
        } else {
            a0 + sk * (s - k as f64) - b0 - sl * (s - l as f64)
        }
    };
    let inner = |s: f64| {
        let ai = a_of(s, ai0, si_k, bi0, si_l);
        let aj = a_of(s, aj0, sj_k, bj0, sj_l);
        let u0 = l as f64 - s;
        let u1 = u0 + 1.0;
        let moment = |m: f64| (u1.powf(m - alpha) - u0.powf(m - alpha)) / (m - alpha);
        ai * aj * moment(0.0) - (ai * sj_l + aj * si_l) * moment(1.0) + si_l * sj_l * moment(2.0)
    };
    let levels = if adjacent { 40 } else { 0 };
    let pieces = graded_breakpoints(k as f64, (k + 1) as f64, levels, Toward::Right);
    rule.integrate_pieces(&pieces, inner)
}
