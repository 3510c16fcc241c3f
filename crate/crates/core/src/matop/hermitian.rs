use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Zero thresholds used by rank, support and exclusion tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T: Real> {
    /// Relative eigenvalue cut: `lambda > eig_zero * max(1, lambda_max)` counts.
    pub eig_zero: T,
    /// Allowed negative eigenvalue before a matrix is rejected as non-PSD.
    pub psd_slack: T,
    /// Absolute threshold below which `tr[T rho]` is treated as zero.
    pub trace_zero: T,
}

impl<T: Real> Tolerance<T> {
    pub fn new(eig_zero: T, psd_slack: T, trace_zero: T) -> Result<Self> {
        let upper = T::lit(1e-3);
        for (name, value) in [
            ("eig_zero", eig_zero),
            ("psd_slack", psd_slack),
            ("trace_zero", trace_zero),
        ] {
            if !(value > T::zero() && value < upper) {
                return Err(Error::InvalidTolerance {
                    name,
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self {
            eig_zero,
            psd_slack,
            trace_zero,
        })
    }

    /// Rank cut for a spectrum whose largest eigenvalue is `lambda_max`.
    pub fn rank_cut(&self, lambda_max: T) -> T {
        self.eig_zero * lambda_max.max(T::one())
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        let z = T::default_zero();
        Self {
            eig_zero: z,
            psd_slack: z,
            trace_zero: z,
        }
    }
}

/// Square matrix equal to its conjugate transpose.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix<T: Real>(ComplexMatrix<T>);

impl<T: Real> std::fmt::Debug for HermitianMatrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl<T: Real> HermitianMatrix<T> {
    /// Validates Hermiticity, then stores the symmetrized `(M + M^dag) / 2`.
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let asym = max_asymmetry(&m);
        if asym > T::hermitian_slack() * m.max_abs().max(T::one()) {
            return Err(Error::NotHermitian {
                max_asymmetry: asym.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self::symmetrized(&m))
    }

    /// `(M + M^dag) / 2` without checking how far `M` was from Hermitian.
    pub(crate) fn symmetrized(m: &ComplexMatrix<T>) -> Self {
        let half = T::lit(0.5);
        Self((m + &m.adjoint()).scale_real(half))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(diag))
    }

    /// `|v><v|` (not normalized).
    pub fn ket_bra(v: &[Complex<T>]) -> Self {
        Self::symmetrized(&ComplexMatrix::outer(v, v))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.0
    }

    pub fn trace(&self) -> T {
        self.0.trace().re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale_real(s))
    }

    /// `A X A^dag`, which stays Hermitian.
    pub fn conjugate_by(&self, a: &ComplexMatrix<T>) -> Self {
        Self::symmetrized(&self.0.conjugate_by(a))
    }

    /// `Re tr[self * other]`.
    pub fn trace_product(&self, other: &Self) -> T {
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + (self.0[(i, j)] * other.0[(j, i)]).re;
            }
        }
        acc
    }

    pub fn distance(&self, other: &Self) -> T {
        self.0.distance(&other.0)
    }

    pub fn cast<U: Real>(&self) -> HermitianMatrix<U> {
        HermitianMatrix(self.0.cast())
    }
}

impl<T: Real> AsRef<ComplexMatrix<T>> for HermitianMatrix<T> {
    fn as_ref(&self) -> &ComplexMatrix<T> {
        &self.0
    }
}

fn max_asymmetry<T: Real>(m: &ComplexMatrix<T>) -> T {
    let n = m.rows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Real> {
    pub eigenvalues: Vec<T>,
    /// Smallest eigenvalue above the default rank cut, if any.
    pub min_positive: Option<T>,
}

impl<T: Real> Spectrum<T> {
    fn from_sorted(eigenvalues: Vec<T>) -> Self {
        let cut = Tolerance::<T>::default().rank_cut(eigenvalues.first().copied().unwrap_or(T::zero()));
        let min_positive = eigenvalues.iter().rev().copied().find(|&l| l > cut);
        Self {
            eigenvalues,
            min_positive,
        }
    }

    pub fn max(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> T {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Number of eigenvalues above the relative cut.
    pub fn count_above(&self, tol: &Tolerance<T>) -> usize {
        let cut = tol.rank_cut(self.max());
        self.eigenvalues.iter().filter(|&&l| l > cut).count()
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi eigendecomposition.
///
/// Returns the spectrum (descending) and a unitary whose columns are the
/// matching eigenvectors, so that `H = V diag(lambda) V^dag`.
pub fn eig_hermitian<T: Real>(h: &HermitianMatrix<T>) -> (Spectrum<T>, ComplexMatrix<T>) {
    let n = h.dim();
    let mut a: Vec<Complex<T>> = h.as_matrix().as_slice().to_vec();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = h.as_matrix().frobenius_norm();
    let target = T::epsilon() * scale;
    let two = T::lit(2.0);

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= target || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = apq.norm();
                if g.is_zero() {
                    continue;
                }
                let phase = apq / g;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (two * g);
                let t = if theta.is_infinite() {
                    T::zero()
                } else {
                    let mag = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                let ph = phase.conj();
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane
                let g_pp = Complex::new(cs, T::zero());
                let g_pq = Complex::new(sn, T::zero());
                let g_qp = ph * (-sn);
                let g_qq = ph * cs;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * g_pp + akq * g_qp;
                    a[k * n + q] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[q * n + k] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[p * n + q] = Complex::zero();
                a[q * n + p] = Complex::zero();
                a[p * n + p].im = T::zero();
                a[q * n + q].im = T::zero();

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .re
            .partial_cmp(&a[i * n + i].re)
            .expect("finite eigenvalues")
    });
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (Spectrum::from_sorted(eigenvalues), vectors)
}

pub fn eigenvalues<T: Real>(h: &HermitianMatrix<T>) -> Spectrum<T> {
    eig_hermitian(h).0
}

pub fn max_eigenvalue<T: Real>(h: &HermitianMatrix<T>) -> T {
    eigenvalues(h).max()
}

pub fn min_eigenvalue<T: Real>(h: &HermitianMatrix<T>) -> T {
    eigenvalues(h).min()
}

fn check_psd<T: Real>(spec: &Spectrum<T>, tol: &Tolerance<T>) -> Result<()> {
    let floor = -tol.psd_slack * spec.max().abs().max(T::one());
    if spec.min() < floor {
        return Err(Error::NotPsd {
            min_eigenvalue: spec.min().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Count of eigenvalues above `eig_zero * max(1, lambda_max)`.
pub fn numerical_rank<T: Real>(h: &HermitianMatrix<T>, tol: &Tolerance<T>) -> Result<usize> {
    let spec = eigenvalues(h);
    check_psd(&spec, tol)?;
    Ok(spec.count_above(tol))
}

/// Orthogonal projector onto the range of a PSD matrix.
pub fn support_projector<T: Real>(h: &HermitianMatrix<T>, tol: &Tolerance<T>) -> Result<HermitianMatrix<T>> {
    let (spec, vecs) = eig_hermitian(h);
    check_psd(&spec, tol)?;
    let rank = spec.count_above(tol);
    Ok(projector_onto_columns(&vecs, rank))
}

/// `I - support_projector(h)`.
pub fn kernel_projector<T: Real>(h: &HermitianMatrix<T>, tol: &Tolerance<T>) -> Result<HermitianMatrix<T>> {
    let support = support_projector(h, tol)?;
    Ok(HermitianMatrix::identity(h.dim()).sub(&support))
}

/// `sum_{c < count} |v_c><v_c|` over the leading columns of `vecs`.
fn projector_onto_columns<T: Real>(vecs: &ComplexMatrix<T>, count: usize) -> HermitianMatrix<T> {
    let n = vecs.rows();
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..count).map(|c| vecs[(i, c)] * vecs[(j, c)].conj()).sum()
    });
    HermitianMatrix::symmetrized(&m)
}

/// Applies `f` to every eigenvalue: `V diag(f(lambda)) V^dag`.
pub fn spectral_map<T: Real>(h: &HermitianMatrix<T>, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
    let (spec, vecs) = eig_hermitian(h);
    let mapped: Vec<T> = spec.eigenvalues.iter().map(|&l| f(l)).collect();
    let d = ComplexMatrix::from_real_diagonal(&mapped);
    HermitianMatrix::symmetrized(&d.conjugate_by(&vecs))
}

/// `A <= B` in the Loewner order: `lambda_min(B - A) >= -psd_slack`.
pub fn loewner_leq<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(min_eigenvalue(&b.sub(a)) >= -tol.psd_slack)
}
