use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matop::{eigenvalues, numerical_rank, ComplexMatrix, HermitianMatrix, Tolerance};
use crate::scalar::{cr, Real};

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: HermitianMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: HermitianMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, &Tolerance::default())
    }

    pub fn with_tolerance(matrix: HermitianMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        let trace = matrix.trace();
        if (trace - T::one()).abs() > T::default_zero() {
            return Err(Error::NotUnitTrace {
                trace: trace.to_f64().unwrap_or(f64::NAN),
            });
        }
        let min = eigenvalues(&matrix).min();
        if min < -tol.psd_slack {
            return Err(Error::NotPsd {
                min_eigenvalue: min.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { matrix })
    }

    /// Divides a PSD matrix by its trace.
    pub fn normalized(matrix: HermitianMatrix<T>) -> Result<Self> {
        let trace = matrix.trace();
        if trace <= T::zero() {
            return Err(Error::NotUnitTrace {
                trace: trace.to_f64().unwrap_or(f64::NAN),
            });
        }
        Self::new(matrix.scale(T::one() / trace))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: HermitianMatrix::identity(d).scale(T::one() / T::from_count(d)),
        }
    }

    /// `|i><i|` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Self {
        Self {
            matrix: HermitianMatrix::new(ComplexMatrix::unit(d, i, i)).expect("diagonal unit is Hermitian"),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix<T> {
        self.matrix
    }

    pub fn rank(&self, tol: &Tolerance<T>) -> Result<usize> {
        numerical_rank(&self.matrix, tol)
    }
}

impl<T: Real> From<&PureState<T>> for DensityMatrix<T> {
    fn from(psi: &PureState<T>) -> Self {
        Self {
            matrix: HermitianMatrix::ket_bra(psi.amplitudes()),
        }
    }
}

/// Unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let norm = norm(&amplitudes);
        if (norm - T::one()).abs() > T::default_zero() {
            return Err(Error::NotNormalized {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n.is_zero() {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        for a in &mut amplitudes {
            *a = *a / n;
        }
        Self::new(amplitudes)
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut amplitudes = vec![Complex::zero(); d];
        amplitudes[i] = cr(T::one());
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * *b)
            .sum()
    }

    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix::from(self)
    }
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}
