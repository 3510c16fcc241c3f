//! Seeded generators for random matrices, states and channels. Used by the
//! property tests and the acceptance suite.

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::matop::{ComplexMatrix, HermitianMatrix};
use crate::quantum::{weyl, DensityMatrix, KrausChannel, PureState, WeylIndex};
use crate::scalar::Real;

pub fn gaussian_complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(re * s), T::lit(im * s))
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

pub fn hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix<T> {
    HermitianMatrix::symmetrized(&ginibre(n, n, rng))
}

/// `A A^dag` with `A` an `n x rank` Ginibre matrix: PSD of rank `rank` almost surely.
pub fn psd_of_rank<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> HermitianMatrix<T> {
    let a = ginibre(n, rank, rng);
    HermitianMatrix::symmetrized(&(&a * &a.adjoint()))
}

pub fn density<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> DensityMatrix<T> {
    DensityMatrix::normalized(psd_of_rank(n, rank, rng)).expect("Ginibre product is PSD")
}

pub fn pure_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState<T> {
    PureState::normalized((0..n).map(|_| gaussian_complex(rng)).collect()).expect("nonzero vector")
}

/// Modified Gram-Schmidt on the columns (thin QR, Q factor only).
pub fn orthonormalize_columns<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<Complex<T>>> = (0..cols).map(|j| m.column(j)).collect();
    for j in 0..cols {
        for i in 0..j {
            let (done, rest) = q.split_at_mut(j);
            let (qi, qj) = (&done[i], &mut rest[0]);
            let proj: Complex<T> = qi.iter().zip(qj.iter()).map(|(a, b)| a.conj() * b).sum();
            for (b, a) in qj.iter_mut().zip(qi) {
                *b = *b - proj * a;
            }
        }
        let norm = q[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for z in &mut q[j] {
            *z = *z / norm;
        }
    }
    ComplexMatrix::from_fn(rows, cols, |r, c| q[c][r])
}

pub fn unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    orthonormalize_columns(&ginibre(n, n, rng))
}

/// Random CPTP map on `C^d` with `m` Kraus operators: stack `m` Ginibre
/// blocks, orthonormalize the `d` columns of the `(m d) x d` stack and slice
/// it back into blocks.
pub fn cptp<T: Real, R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> KrausChannel<T> {
    let stacked = ginibre(m * d, d, rng);
    let iso = orthonormalize_columns(&stacked);
    let ops = (0..m)
        .map(|k| ComplexMatrix::from_fn(d, d, |r, c| iso[(k * d + r, c)]))
        .collect();
    KrausChannel::new(ops).expect("isometry slices are complete")
}

fn probability_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random convex mixture of the `d^2` Weyl unitaries (unital by construction).
pub fn weyl_mixture<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> KrausChannel<T> {
    let weights = probability_weights(d * d, rng);
    let ops = WeylIndex::all(d)
        .zip(weights)
        .map(|(idx, w)| weyl::<T>(idx).scale_real(T::lit(w.sqrt())))
        .collect();
    KrausChannel::new(ops).expect("weights sum to one")
}

/// Random convex mixture of `terms` random unitaries (unital by construction).
pub fn mixed_unitary<T: Real, R: Rng + ?Sized>(d: usize, terms: usize, rng: &mut R) -> KrausChannel<T> {
    let weights = probability_weights(terms, rng);
    let ops = weights
        .into_iter()
        .map(|w| unitary::<T, R>(d, rng).scale_real(T::lit(w.sqrt())))
        .collect();
    KrausChannel::new(ops).expect("weights sum to one")
}

/// Probability vector of length `n` supported on `support` random coordinates.
pub fn probability_vector<R: Rng + ?Sized>(n: usize, support: usize, rng: &mut R) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let weights = probability_weights(support, rng);
    let mut v = vec![0.0; n];
    for (w, &i) in weights.into_iter().zip(&idx) {
        v[i] = w;
    }
    v
}
