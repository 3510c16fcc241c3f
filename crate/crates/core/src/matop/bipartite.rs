use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which factor of a bipartite space `A (x) B` an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Kronecker product. Basis `|i>_A (x) |j>_B` sits at flat index `i * dim_B + j`.
pub fn tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of two vectors under the same index convention.
pub fn tensor_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Traces out the subsystem that is *not* `keep`.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    keep: Subsystem,
    (da, db): (usize, usize),
) -> Result<ComplexMatrix<T>> {
    let n = da * db;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.rows().max(m.cols()),
        });
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, k| {
            (0..db).fold(Complex::zero(), |acc, j| acc + m[(i * db + j, k * db + j)])
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |j, l| {
            (0..da).fold(Complex::zero(), |acc, i| acc + m[(i * db + j, i * db + l)])
        }),
    })
}

/// Transpose in the computational basis (no conjugation).
pub fn transpose_in_basis<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    m.transpose()
}
