//! Spectra, majorization and support counting, plus the check that unital
//! channels never lower the rank of a state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matop::{eigenvalues, Tolerance};
use crate::quantum::{apply_kraus, DensityMatrix, KrausChannel};
use crate::scalar::Real;

/// Finite real vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RealVector<T: Real>(Vec<T>);

impl<T: Real> RealVector<T> {
    pub fn new(components: Vec<T>) -> Result<Self> {
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(components))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[T] {
        &self.0
    }

    pub fn sum(&self) -> T {
        self.0.iter().copied().sum()
    }

    /// Components in descending order.
    pub fn sorted_desc(&self) -> Vec<T> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| b.partial_cmp(a).expect("finite entries"));
        v
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&i| self.0[i]).collect())
    }
}

/// Clipped, renormalized eigenvalues of a state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSpectrum<T: Real> {
    pub values: RealVector<T>,
    /// `|1 - sum|` before renormalization.
    pub residual: T,
}

/// Eigenvalues in descending order, with everything at or below `eig_zero`
/// set to zero and the rest rescaled to sum to one.
pub fn spectrum<T: Real>(rho: &DensityMatrix<T>, tol: &Tolerance<T>) -> StateSpectrum<T> {
    let mut values = eigenvalues(rho.matrix()).eigenvalues;
    for v in values.iter_mut() {
        if *v <= tol.eig_zero {
            *v = T::zero();
        }
    }
    let total: T = values.iter().copied().sum();
    if total > T::zero() {
        for v in values.iter_mut() {
            *v = *v / total;
        }
    }
    StateSpectrum {
        values: RealVector(values),
        residual: (T::one() - total).abs(),
    }
}

/// `x` majorizes `y`: every descending prefix sum of `x` is at least the
/// matching one of `y`, up to `T::default_zero()`.
pub fn majorizes<T: Real>(x: &RealVector<T>, y: &RealVector<T>) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let slack = T::default_zero();
    let (sx, sy) = (x.sum(), y.sum());
    if (sx - sy).abs() > slack {
        return Err(Error::SumMismatch {
            left: sx.to_f64().unwrap_or(f64::NAN),
            right: sy.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (xs, ys) = (x.sorted_desc(), y.sorted_desc());
    let (mut px, mut py) = (T::zero(), T::zero());
    for (a, b) in xs.into_iter().zip(ys) {
        px = px + a;
        py = py + b;
        if px < py - slack {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Number of components strictly above `eig_zero`.
pub fn supp_count<T: Real>(v: &RealVector<T>, tol: &Tolerance<T>) -> usize {
    v.0.iter().filter(|&&c| c > tol.eig_zero).count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityVerdict<T: Real> {
    /// `lambda(rho)` majorizes `lambda(E(rho))`.
    pub majorized: bool,
    pub rank_in: usize,
    pub rank_out: usize,
    pub spectrum_in: RealVector<T>,
    pub spectrum_out: RealVector<T>,
}

impl<T: Real> MonotonicityVerdict<T> {
    pub fn holds(&self) -> bool {
        self.majorized && self.rank_out >= self.rank_in
    }
}

/// Evaluates `E` on `rho` and compares spectra and support sizes.
/// Non-unital channels are rejected, since no claim is made for them.
pub fn unital_monotonicity_check<T: Real>(
    e: &KrausChannel<T>,
    rho: &DensityMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<MonotonicityVerdict<T>> {
    if e.d_in() != e.d_out() {
        return Err(Error::DimensionMismatch {
            expected: e.d_in(),
            found: e.d_out(),
        });
    }
    let residual = e.unitality_residual();
    if residual > T::identity_slack() {
        return Err(Error::NotUnital {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    let out = apply_kraus(e, rho)?;
    let before = spectrum(rho, tol).values;
    let after = spectrum(&out, tol).values;
    Ok(MonotonicityVerdict {
        majorized: majorizes(&before, &after)?,
        rank_in: supp_count(&before, tol),
        rank_out: supp_count(&after, tol),
        spectrum_in: before,
        spectrum_out: after,
    })
}
