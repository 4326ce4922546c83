//! Dense complex linear algebra and scalar special functions.
//!
//! Matrices are dense, row-major `Complex64` (every dimension in this crate
//! is at most a few hundred). Positive-definite solves go through a
//! Hermitian Cholesky factorization; a non-positive pivot is reported as an
//! error rather than regularized away, so estimator divergence stays
//! visible.

mod special;

pub use special::{chi2_cdf, chi2_quantile, ln_beta, ln_gamma, reg_incomplete_beta, reg_incomplete_gamma_p};

use crate::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Absolute tolerance for the Hermitian symmetry check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn from_vec(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![Complex64::ZERO; dim] }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Squared Euclidean norm `z^H z`.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Scale every entry by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { data: self.data.iter().map(|c| c * factor).collect() }
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.data[i]
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Parameter("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }


    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Plain transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|c| c * factor).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Matrix-vector product.
    pub fn mul_vector(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = Complex64::ZERO;
            for (a, b) in row.iter().zip(v.as_slice()) {
                acc += a * b;
            }
            out[i] = acc;
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix addition shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix subtraction shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Complex Hermitian matrix (optionally positive-definite, checked at the
/// factorization sites).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Validate Hermitian symmetry (within [`HERMITIAN_TOL`]) and wrap.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let dim = m.rows();
        let mut max_dev: f64 = 0.0;
        for i in 0..dim {
            for j in 0..=i {
                let dev = (m.get(i, j) - m.get(j, i).conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { max_deviation: max_dev });
        }
        // Store the exactly-symmetrized version so downstream algebra sees
        // M[i][j] == conj(M[j][i]) bit-for-bit.
        let mut data = m.data.clone();
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(data[i * dim + i].re, 0.0);
            for j in 0..i {
                let avg = (data[i * dim + j] + data[j * dim + i].conj()) * 0.5;
                data[i * dim + j] = avg;
                data[j * dim + i] = avg.conj();
            }
        }
        Ok(Self { dim, data })
    }

    /// Wrap storage that is Hermitian by construction.
    pub(crate) fn from_raw_unchecked(dim: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::ONE;
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn as_matrix(&self) -> ComplexMatrix {
        ComplexMatrix { rows: self.dim, cols: self.dim, data: self.data.clone() }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|c| c * factor).collect() }
    }

    /// Rescale so that the trace equals `target`.
    pub fn rescaled_to_trace(&self, target: f64) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 || tr.is_nan() {
            return Err(Error::DegenerateInput(format!("nonpositive trace {tr}")));
        }
        Ok(self.scaled(target / tr))
    }

    /// Hermitian Cholesky factorization `M = L L^H`.
    ///
    /// A pivot that is not strictly positive (or not finite) reports
    /// [`Error::NotPositiveDefinite`].
    pub fn cholesky(&self) -> Result<Cholesky> {
        let n = self.dim;
        let mut l = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.data[i * n + j];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k].conj();
                }
                if i == j {
                    let pivot = sum.re;
                    if pivot <= 0.0 || !pivot.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot_index: i });
                    }
                    l[i * n + i] = Complex64::new(pivot.sqrt(), 0.0);
                } else {
                    l[i * n + j] = sum / l[j * n + j].re;
                }
            }
        }
        Ok(Cholesky { dim: n, l })
    }

    /// True when the Cholesky factorization succeeds.
    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_ok()
    }
}

/// Lower-triangular Cholesky factor of a positive-definite Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    l: Vec<Complex64>,
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The factor as a dense lower-triangular matrix.
    pub fn factor(&self) -> ComplexMatrix {
        ComplexMatrix { rows: self.dim, cols: self.dim, data: self.l.clone() }
    }

    /// Forward substitution `L y = b`, writing into `out`.
    pub(crate) fn forward_solve_into(&self, b: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        for i in 0..n {
            let mut sum = b[i];
            let row = &self.l[i * n..i * n + i];
            for (k, lv) in row.iter().enumerate() {
                sum -= lv * out[k];
            }
            out[i] = sum / self.l[i * n + i].re;
        }
    }

    /// Back substitution `L^H x = y` in place.
    fn backward_solve_in_place(&self, y: &mut [Complex64]) {
        let n = self.dim;
        for i in (0..n).rev() {
            let mut sum = y[i];
            for (j, yj) in y.iter().enumerate().take(n).skip(i + 1) {
                sum -= self.l[j * n + i].conj() * yj;
            }
            y[i] = sum / self.l[i * n + i].re;
        }
    }

    /// Solve `M x = b`.
    pub fn solve_vector(&self, b: &ComplexVector) -> Result<ComplexVector> {
        if b.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "solve: matrix dim {} vs vector dim {}",
                self.dim,
                b.dim()
            )));
        }
        let mut out = vec![Complex64::ZERO; self.dim];
        self.forward_solve_into(b.as_slice(), &mut out);
        self.backward_solve_in_place(&mut out);
        Ok(ComplexVector::from_vec(out))
    }

    /// Solve `M X = B` column by column.
    pub fn solve_matrix(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.rows() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "solve: matrix dim {} vs rhs rows {}",
                self.dim,
                b.rows()
            )));
        }
        let n = self.dim;
        let cols = b.cols();
        let mut out = ComplexMatrix::zeros(n, cols);
        let mut col = vec![Complex64::ZERO; n];
        let mut sol = vec![Complex64::ZERO; n];
        for j in 0..cols {
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = b.get(i, j);
            }
            self.forward_solve_into(&col, &mut sol);
            self.backward_solve_in_place(&mut sol);
            for (i, v) in sol.iter().enumerate() {
                out.set(i, j, *v);
            }
        }
        Ok(out)
    }

    /// Quadratic form `z^H M^{-1} z = ||L^{-1} z||^2` (real, nonnegative).
    pub fn quadratic_form(&self, z: &ComplexVector) -> f64 {
        debug_assert_eq!(z.dim(), self.dim);
        let mut y = vec![Complex64::ZERO; self.dim];
        self.forward_solve_into(z.as_slice(), &mut y);
        y.iter().map(|c| c.norm_sqr()).sum()
    }

    pub(crate) fn quadratic_form_with_scratch(&self, z: &[Complex64], scratch: &mut [Complex64]) -> f64 {
        self.forward_solve_into(z, scratch);
        scratch.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Column-stacking operator: the columns of `a` concatenated top to bottom.
pub fn vectorize(a: &ComplexMatrix) -> ComplexVector {
    let (r, c) = (a.rows(), a.cols());
    let mut out = ComplexVector::zeros(r * c);
    for j in 0..c {
        for i in 0..r {
            out[i + r * j] = a.get(i, j);
        }
    }
    out
}

/// Kronecker product `a (x) b`.
pub fn kronecker(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for ia in 0..ra {
        for ja in 0..ca {
            let va = a.get(ia, ja);
            if va == Complex64::ZERO {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    out.set(ia * rb + ib, ja * cb + jb, va * b.get(ib, jb));
                }
            }
        }
    }
    out
}

/// Commutation matrix `K` of size `mn x mn` with `K vec(A) = vec(A^T)` for
/// every `m x n` matrix `A`.
pub fn commutation_matrix(m: usize, n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            out.set(j + n * i, i + m * j, Complex64::ONE);
        }
    }
    out
}

/// Real Toeplitz scatter matrix with entries `rho^|i-j|` (unit diagonal,
/// trace `m`, positive-definite for `rho` in `[0, 1)`).
pub fn toeplitz_scatter(rho: f64, m: usize) -> Result<HermitianMatrix> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Parameter(format!("rho must be in [0,1), got {rho}")));
    }
    if m == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    let mut data = vec![Complex64::ZERO; m * m];
    for i in 0..m {
        for j in 0..m {
            data[i * m + j] = Complex64::new(rho.powi((i as i32 - j as i32).abs()), 0.0);
        }
    }
    Ok(HermitianMatrix::from_raw_unchecked(m, data))
}

/// Solve `M X = B` for positive-definite Hermitian `M`.
pub fn hermitian_inverse_solve(m: &HermitianMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.cholesky()?.solve_matrix(b)
}
