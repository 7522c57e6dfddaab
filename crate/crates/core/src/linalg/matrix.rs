use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn filled(rows: usize, cols: usize, value: C64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::BadShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Entrywise (Schur/Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Keeps only the diagonal.
    pub fn diagonal_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            if r == c {
                self[(r, c)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Largest entrywise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Tolerance on `|a_kl − conj(a_lk)|` accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Square complex matrix equal to its conjugate transpose.
///
/// The stored entries are exactly Hermitian: the constructor averages `a` and
/// `a*` after checking they agree to [`HERMITIAN_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(entries: ComplexMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.rows(),
                cols: entries.cols(),
            });
        }
        if entries.rows() == 0 {
            return Err(Error::BadShape {
                rows: 0,
                cols: 0,
                len: 0,
            });
        }
        if !entries.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = entries.rows();
        let mut deviation: f64 = 0.0;
        for k in 0..n {
            for l in k..n {
                deviation = deviation.max((entries[(k, l)] - entries[(l, k)].conj()).norm());
            }
        }
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(entries))
    }

    /// `(X + X*)/2`, for any square matrix.
    pub fn symmetrized(m: ComplexMatrix) -> Self {
        let n = m.rows();
        let mut out = m;
        for k in 0..n {
            out[(k, k)] = C64::new(out[(k, k)].re, 0.0);
            for l in (k + 1)..n {
                let avg = (out[(k, l)] + out[(l, k)].conj()) * 0.5;
                out[(k, l)] = avg;
                out[(l, k)] = avg.conj();
            }
        }
        Self { entries: out }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            entries: ComplexMatrix::from_diagonal(diag),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.entries
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::symmetrized(self.entries.add(&other.entries)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::symmetrized(self.entries.sub(&other.entries)?))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.scale(C64::new(factor, 0.0)),
        }
    }

    /// `self + shift · I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.entries.clone();
        for k in 0..m.rows() {
            m[(k, k)] += shift;
        }
        Self { entries: m }
    }
}
