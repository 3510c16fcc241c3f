use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension(rows.min(cols)));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds from nested rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { cr(diag[i]) } else { Complex::zero() })
    }

    /// `|u><v|`
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// `|i><j|` in dimension `d`.
    pub fn unit(d: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(d, d);
        m[(i, j)] = Complex::one();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex<T>>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `||self - other||_F`; panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> T {
        (self - other).frobenius_norm()
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    /// `A X A^dag`
    pub fn conjugate_by(&self, a: &Self) -> Self {
        &(a * self) * &a.adjoint()
    }

    /// `||U^dag U - I||_F`
    pub fn unitarity_residual(&self) -> T {
        let gram = &self.adjoint() * self;
        gram.distance(&Self::identity(self.cols))
    }

    pub fn is_unitary(&self, slack: T) -> bool {
        self.is_square() && self.unitarity_residual() <= slack
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let src = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(src) {
                    *d = *d + a * *b;
                }
            }
        }
        out
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "elementwise shape mismatch"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64().unwrap()), U::lit(z.im.to_f64().unwrap())))
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        self.mul_unchecked(rhs)
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols) {
            let cells: Vec<String> = row.iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect();
            writeln!(f, "  {}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}
