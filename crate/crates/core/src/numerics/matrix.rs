//! Dense complex matrices and Hermitian log-determinants.
//!
//! Matrices here are tiny (at most a few dozen rows), so everything is a
//! row-major `Vec<Complex64>` with straightforward loops.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative eigenvalue floor used for positive-definiteness checks.
pub const PD_RELATIVE_FLOOR: f64 = 1e-12;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn scalar(z: Complex64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// `self * self^H`, Hermitian by construction.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.cols {
                    acc += self[(i, k)] * self[(j, k)].conj();
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        for i in 0..n {
            out[(i, i)].im = 0.0;
        }
        out
    }

    /// `self^H * self`.
    pub fn gram_adjoint(&self) -> Self {
        self.adjoint().gram()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} plus {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn add_assign_scaled(&mut self, rhs: &Self, s: f64) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} plus {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b * s;
        }
        Ok(())
    }

    /// Adds `s` to every diagonal entry.
    pub fn add_diag(&mut self, s: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)].re += s;
        }
    }

    /// Copies the submatrix with the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::DimensionMismatch(format!(
                "index out of range for a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])]))
    }

    /// Stacks matrices vertically; all must share a column count.
    pub fn vstack(parts: &[&Self]) -> Result<Self> {
        let cols = parts.first().map_or(0, |p| p.cols);
        if parts.iter().any(|p| p.cols != cols) {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for p in parts {
            data.extend_from_slice(&p.data);
        }
        Ok(Self { rows, cols, data })
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A Hermitian positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPsd(ComplexMatrix);

impl HermitianPsd {
    /// Validates conjugate symmetry (1e-12 relative) and numerical PSD
    /// (eigenvalues no lower than -1e-10 relative).
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("Hermitian matrix must be square".into()));
        }
        if !m.is_finite() {
            return Err(Error::InvalidArgument("non-finite covariance entry".into()));
        }
        let scale = max_diag(&m).max(1.0);
        let n = m.rows();
        for i in 0..n {
            for j in i..n {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > 1e-12 * scale {
                    return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
                }
            }
        }
        let mut shifted = m.clone();
        shifted.add_diag(1e-10 * scale);
        if cholesky_logdet(&shifted, 0.0).is_err() {
            return Err(Error::InvalidArgument("matrix is not positive semidefinite".into()));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is Hermitian PSD by construction (e.g. `A A^H + D`).
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    /// Principal submatrix on `idx`.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self(ComplexMatrix::from_fn(idx.len(), idx.len(), |i, j| {
            self.0[(idx[i], idx[j])]
        }))
    }
}

fn max_diag(m: &ComplexMatrix) -> f64 {
    (0..m.rows().min(m.cols()))
        .map(|i| m[(i, i)].re.abs())
        .fold(0.0, f64::max)
}

/// Cholesky of the unit-diagonal rescaling `D^{-1/2} A D^{-1/2}`, returning
/// `ln det A`. Fails when a pivot of the rescaled matrix drops to
/// `rel_floor` or below, so blocks of very different scale do not trip it.
fn cholesky_logdet(a: &ComplexMatrix, rel_floor: f64) -> Result<f64> {
    let n = a.rows();
    if n == 0 {
        return Ok(0.0);
    }
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    if diag.iter().any(|&d| !d.is_finite() || d <= 0.0) {
        return Err(Error::SingularMatrix);
    }
    let inv_sqrt: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut l = ComplexMatrix::from_fn(n, n, |i, j| a[(i, j)] * (inv_sqrt[i] * inv_sqrt[j]));
    let mut logdet: f64 = diag.iter().map(|d| d.ln()).sum();
    for j in 0..n {
        let mut d = l[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= rel_floor || d <= 0.0 {
            return Err(Error::SingularMatrix);
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        logdet += d.ln();
        for i in (j + 1)..n {
            let mut s = l[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(logdet)
}

/// Natural log-determinant of a positive-definite Hermitian matrix.
pub fn logdet_hermitian(a: &HermitianPsd) -> Result<f64> {
    cholesky_logdet(&a.0, PD_RELATIVE_FLOOR)
}

/// `log2 det(I + snr * M M^H)` in bits.
pub fn mutual_info_bits(snr: f64, m: &ComplexMatrix) -> f64 {
    if snr == 0.0 || m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    // det(I + s M M^H) = det(I + s M^H M); factor the smaller side.
    let mut g = if m.rows() <= m.cols() {
        m.gram()
    } else {
        m.gram_adjoint()
    };
    g = g.scale(snr);
    g.add_diag(1.0);
    // I + PSD has every eigenvalue >= 1, so the factorization cannot fail.
    cholesky_logdet(&g, 0.0).unwrap_or(f64::NAN) / std::f64::consts::LN_2
}
