//! Structured representations of the level operators.
//!
//! Every operator in a hierarchy is `scale * (T + E)` with `T` a symmetric
//! Toeplitz matrix (first column only) and `E` a symmetric tridiagonal
//! matrix. Storage is linear in `n`; products go through a circulant
//! embedding of `T` and cost `O(n log n)`.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use realfft::num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

/// Largest dimension `to_dense` materializes unless told otherwise.
pub const DEFAULT_DENSE_CAP: usize = 4096;

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Symmetric Toeplitz matrix stored by its first column: entry `(i, j)` is
/// `coeffs[|i - j|]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricToeplitz {
    coeffs: Vec<f64>,
}

impl SymmetricToeplitz {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty);
        }
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; n];
        if let Some(c0) = coeffs.first_mut() {
            *c0 = 1.0;
        }
        Self::new(coeffs)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i.abs_diff(j)]
    }
}

/// Symmetric tridiagonal matrix: `diag` has `n` entries, `off` has `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Empty);
        }
        check_len(diag.len() - 1, off.len())?;
        check_finite(&diag)?;
        check_finite(&off)?;
        Ok(Self { diag, off })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Self::new(vec![0.0; n], vec![0.0; n - 1])
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.diag.iter().chain(&self.off).all(|&v| v == 0.0)
    }
}

/// Exact banded product `E x`.
pub fn tridiag_matvec(e: &SymmetricTridiagonal, x: &[f64]) -> Result<Vec<f64>> {
    check_len(e.n(), x.len())?;
    check_finite(x)?;
    let mut y = vec![0.0; x.len()];
    tridiag_accumulate(e, x, 1.0, &mut y);
    Ok(y)
}

fn tridiag_accumulate(e: &SymmetricTridiagonal, x: &[f64], alpha: f64, y: &mut [f64]) {
    let n = e.n();
    for i in 0..n {
        let mut acc = e.diag[i] * x[i];
        if i > 0 {
            acc += e.off[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            acc += e.off[i] * x[i + 1];
        }
        y[i] += alpha * acc;
    }
}

/// Smallest power of two that holds the circulant embedding of an `n x n`
/// Toeplitz matrix.
pub fn embedding_size(n: usize) -> usize {
    (2 * n).next_power_of_two().max(2)
}

/// FFT buffers reused across products on the same thread.
#[derive(Default)]
struct Workspace {
    buf: Vec<f64>,
    spec: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

thread_local! {
    static WORKSPACE: RefCell<Workspace> = RefCell::new(Workspace::default());
}

/// Precomputed circulant embedding of a symmetric Toeplitz matrix.
///
/// The circulant's first column is `[c_0, .., c_{n-1}, 0, .., 0, c_{n-1}, .., c_1]`
/// of length [`embedding_size`]; its eigenvalues are the real FFT of that
/// column.
#[derive(Clone)]
pub struct CirculantEmbedding {
    n: usize,
    len: usize,
    eigenvalues: Vec<f64>,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

impl fmt::Debug for CirculantEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CirculantEmbedding")
            .field("n", &self.n)
            .field("len", &self.len)
            .finish()
    }
}

impl CirculantEmbedding {
    pub fn new(t: &SymmetricToeplitz) -> Self {
        let n = t.n();
        let len = embedding_size(n);
        let mut planner = RealFftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);

        let mut column = vec![0.0; len];
        column[..n].copy_from_slice(t.coeffs());
        for k in 1..n {
            column[len - k] = t.coeffs()[k];
        }
        let mut spectrum = forward.make_output_vec();
        forward
            .process(&mut column, &mut spectrum)
            .expect("buffer sizes come from the plan");
        // Symmetric column, so the spectrum is real up to round-off.
        let eigenvalues = spectrum.iter().map(|z| z.re).collect();

        Self {
            n,
            len,
            eigenvalues,
            forward,
            inverse,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `y += alpha * T x`.
    fn accumulate(&self, x: &[f64], alpha: f64, y: &mut [f64]) {
        WORKSPACE.with(|ws| {
            let ws = &mut *ws.borrow_mut();
            ws.buf.clear();
            ws.buf.extend_from_slice(x);
            ws.buf.resize(self.len, 0.0);
            ws.spec.resize(self.len / 2 + 1, Complex::default());
            ws.scratch.resize(
                self.forward
                    .get_scratch_len()
                    .max(self.inverse.get_scratch_len()),
                Complex::default(),
            );
            self.forward
                .process_with_scratch(&mut ws.buf, &mut ws.spec, &mut ws.scratch)
                .expect("buffer sizes come from the plan");
            for (z, &lam) in ws.spec.iter_mut().zip(&self.eigenvalues) {
                *z *= lam;
            }
            // DC and Nyquist bins of a real signal are real.
            ws.spec[0].im = 0.0;
            if let Some(last) = ws.spec.last_mut() {
                last.im = 0.0;
            }
            self.inverse
                .process_with_scratch(&mut ws.spec, &mut ws.buf, &mut ws.scratch)
                .expect("buffer sizes come from the plan");
            let norm = alpha / self.len as f64;
            for (yi, bi) in y.iter_mut().zip(&ws.buf[..self.n]) {
                *yi += norm * bi;
            }
        });
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        check_finite(x)?;
        let mut y = vec![0.0; self.n];
        self.accumulate(x, 1.0, &mut y);
        Ok(y)
    }
}

/// `y = T x` through the circulant embedding.
pub fn toeplitz_matvec(t: &SymmetricToeplitz, x: &[f64]) -> Result<Vec<f64>> {
    CirculantEmbedding::new(t).apply(x)
}

/// `scale * (T + E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzPlusTridiagonal {
    scale: f64,
    toeplitz: SymmetricToeplitz,
    tridiag: SymmetricTridiagonal,
}

impl ToeplitzPlusTridiagonal {
    pub fn new(
        scale: f64,
        toeplitz: SymmetricToeplitz,
        tridiag: SymmetricTridiagonal,
    ) -> Result<Self> {
        check_len(toeplitz.n(), tridiag.n())?;
        if !scale.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(Self {
            scale,
            toeplitz,
            tridiag,
        })
    }

    /// Pure Toeplitz operator with an empty tridiagonal slot.
    pub fn toeplitz_only(scale: f64, toeplitz: SymmetricToeplitz) -> Result<Self> {
        let tridiag = SymmetricTridiagonal::zeros(toeplitz.n())?;
        Self::new(scale, toeplitz, tridiag)
    }

    pub fn n(&self) -> usize {
        self.toeplitz.n()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn toeplitz(&self) -> &SymmetricToeplitz {
        &self.toeplitz
    }

    pub fn tridiag(&self) -> &SymmetricTridiagonal {
        &self.tridiag
    }

    /// Splits into `(scale, toeplitz, tridiag)`.
    pub fn into_parts(self) -> (f64, SymmetricToeplitz, SymmetricTridiagonal) {
        (self.scale, self.toeplitz, self.tridiag)
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.scale * (self.toeplitz.entry(i, j) + self.tridiag.entry(i, j))
    }

    /// Diagonal entry `i`, read off the structure in O(1).
    pub fn diagonal_entry(&self, i: usize) -> f64 {
        self.scale * (self.toeplitz.coeffs()[0] + self.tridiag.diag()[i])
    }

    /// Number of scalars held by the representation: `n` Toeplitz
    /// coefficients, `n` diagonal and `n - 1` off-diagonal entries, plus the
    /// scale.
    pub fn stored_scalars(&self) -> usize {
        self.toeplitz.coeffs().len() + self.tridiag.diag().len() + self.tridiag.off().len() + 1
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        PreparedOperator::new(self.clone()).apply(x)
    }

    pub fn residual(&self, x: &[f64], f: &[f64]) -> Result<Vec<f64>> {
        PreparedOperator::new(self.clone()).residual(x, f)
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        self.to_dense_capped(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<DMatrix<f64>> {
        let n = self.n();
        if n > cap {
            return Err(Error::DenseCapExceeded { n, cap });
        }
        Ok(DMatrix::from_fn(n, n, |i, j| self.entry(i, j)))
    }
}

/// A level operator together with its circulant embedding, so repeated
/// products skip the symbol transform.
#[derive(Debug, Clone)]
pub struct PreparedOperator {
    matrix: ToeplitzPlusTridiagonal,
    embedding: CirculantEmbedding,
}

impl PreparedOperator {
    pub fn new(matrix: ToeplitzPlusTridiagonal) -> Self {
        let embedding = CirculantEmbedding::new(matrix.toeplitz());
        Self { matrix, embedding }
    }

    pub fn matrix(&self) -> &ToeplitzPlusTridiagonal {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// `y = scale * (T x + E x)`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), x.len())?;
        check_finite(x)?;
        let mut y = vec![0.0; x.len()];
        self.accumulate(x, 1.0, &mut y);
        Ok(y)
    }

    /// `f - A x`.
    pub fn residual(&self, x: &[f64], f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), x.len())?;
        check_len(self.n(), f.len())?;
        check_finite(x)?;
        check_finite(f)?;
        let mut r = f.to_vec();
        self.accumulate(x, -1.0, &mut r);
        Ok(r)
    }

    fn accumulate(&self, x: &[f64], alpha: f64, y: &mut [f64]) {
        let a = alpha * self.matrix.scale;
        self.embedding.accumulate(x, a, y);
        if !self.matrix.tridiag.is_zero() {
            tridiag_accumulate(&self.matrix.tridiag, x, a, y);
        }
    }
}

/// `f - A x` for a single product.
pub fn residual(a: &ToeplitzPlusTridiagonal, x: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    a.residual(x, f)
}
