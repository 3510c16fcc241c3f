use serde::Serialize;

use super::{binomial, ExclusionEnsemble, Label, Povm, SubsetFamily};
use crate::error::{Error, Result};
use crate::matop::{eig_hermitian, max_eigenvalue, spectral_map, support_projector, HermitianMatrix, Tolerance};
use crate::quantum::DensityMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Report<T: Real> {
    pub feasible: bool,
    pub n: usize,
    pub k: usize,
    /// `lambda_max(sum_x Pi_x)`
    pub lambda_max: T,
}

/// Necessary condition for conclusive `k`-exclusion: `sum_x Pi_x <= (N - k) I`.
pub fn lemma1_feasible<T: Real>(ens: &ExclusionEnsemble<T>, k: usize, tol: &Tolerance<T>) -> Result<Lemma1Report<T>> {
    let n = ens.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidK { k, max: n - 1 });
    }
    let lambda_max = max_eigenvalue(&ens.projector_sum());
    Ok(Lemma1Report {
        feasible: lambda_max <= T::from_count(n - k) + tol.psd_slack,
        n,
        k,
        lambda_max,
    })
}

/// Largest `k` with `N - k >= lambda_max(sum Pi_x) - psd_slack`, floored at 0.
pub fn lemma1_max_k<T: Real>(ens: &ExclusionEnsemble<T>, tol: &Tolerance<T>) -> usize {
    let lambda_max = max_eigenvalue(&ens.projector_sum());
    floor_nonneg(T::from_count(ens.len()) - lambda_max + tol.psd_slack)
}

fn floor_nonneg<T: Real>(x: T) -> usize {
    if x <= T::zero() {
        0
    } else {
        x.floor().to_usize().unwrap_or(0)
    }
}

/// `log2 min{lambda >= 1 : psi <= lambda sigma}`, or `+inf` when the support
/// of `psi` leaves the support of `sigma`.
pub fn d_max<T: Real>(psi: &DensityMatrix<T>, sigma: &DensityMatrix<T>, tol: &Tolerance<T>) -> Result<T> {
    if psi.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: psi.dim(),
        });
    }
    let support = support_projector(sigma.matrix(), tol)?;
    let outside = HermitianMatrix::identity(sigma.dim()).sub(&support);
    if psi.matrix().trace_product(&outside) > tol.trace_zero {
        return Ok(T::infinity());
    }
    let (spec, _) = eig_hermitian(sigma.matrix());
    let cut = tol.rank_cut(spec.max());
    let inv_sqrt = spectral_map(sigma.matrix(), |l| if l > cut { T::one() / l.sqrt() } else { T::zero() });
    let sandwiched = psi.matrix().conjugate_by(inv_sqrt.as_matrix());
    Ok(max_eigenvalue(&sandwiched).max(T::one()).log2())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryBound<T: Real> {
    /// `tr[sum_x Pi_x]`
    pub alpha: T,
    /// `sum_x Pi_x / alpha`
    #[serde(skip)]
    pub omega: DensityMatrix<T>,
    /// `D_max(omega || I/d)`
    pub dmax: T,
    /// `floor(N - 2^dmax alpha / d)`
    pub k_first: usize,
    /// `floor(N (d-1) / d)`
    pub k_second: usize,
}

/// Both upper bounds on `k`; `d` is the dimension the states live in.
pub fn corollary1_bounds<T: Real>(ens: &ExclusionEnsemble<T>, tol: &Tolerance<T>) -> Result<CorollaryBound<T>> {
    let n = ens.len();
    let d = ens.dim();
    let sum = ens.projector_sum();
    let alpha = sum.trace();
    let omega = DensityMatrix::new(sum.scale(T::one() / alpha))?;
    let dmax = d_max(&omega, &DensityMatrix::maximally_mixed(d), tol)?;
    let weight = T::lit(2.0).powf(dmax) * alpha / T::from_count(d);
    let k_first = floor_nonneg(T::from_count(n) - weight + tol.psd_slack);
    let k_second = n * (d - 1) / d;
    Ok(CorollaryBound {
        alpha,
        omega,
        dmax,
        k_first,
        k_second,
    })
}

/// `{(I - Pi_x) / k}`, valid when `sum_x Pi_x = (N - k) I`. Effect `x` carries
/// the label `{x}`: it excludes state `x`.
pub fn saturation_povm<T: Real>(ens: &ExclusionEnsemble<T>, k: usize) -> Result<Povm<T>> {
    let n = ens.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidK { k, max: n - 1 });
    }
    let d = ens.dim();
    let target = HermitianMatrix::identity(d).scale(T::from_count(n - k));
    let residual = ens.projector_sum().distance(&target);
    if residual > T::identity_slack() {
        return Err(Error::NotSaturated {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    let inv_k = T::one() / T::from_count(k);
    let effects = ens
        .projectors()
        .iter()
        .map(|p| HermitianMatrix::identity(d).sub(p).scale(inv_k))
        .collect();
    Povm::new(effects, Some((0..n).map(|x| Label::subset(vec![x])).collect()))
}

pub const DEFAULT_REFORMULATION_CAP: usize = 10_000;

/// The equivalent 1-exclusion problem: one state `R_Y / k` per `k`-subset.
#[derive(Debug, Clone, PartialEq)]
pub struct Reformulation<T: Real> {
    pub ensemble: ExclusionEnsemble<T>,
    pub family: SubsetFamily,
}

/// Replaces the ensemble by `{R_Y / k}` with `R_Y = sum_{y in Y} rho_y`,
/// subsets in lexicographic order, uniform priors.
pub fn reformulate_k_to_1<T: Real>(
    ens: &ExclusionEnsemble<T>,
    k: usize,
    cap: usize,
    tol: &Tolerance<T>,
) -> Result<Reformulation<T>> {
    let n = ens.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidK { k, max: n - 1 });
    }
    let count = binomial(n, k);
    if count > cap as u128 {
        return Err(Error::CapExceeded { n, k, count, cap });
    }
    let family = SubsetFamily::new(n, k)?;
    let inv_k = T::one() / T::from_count(k);
    let states = family
        .subsets
        .iter()
        .map(|ys| {
            let sum = ys
                .iter()
                .fold(HermitianMatrix::zeros(ens.dim()), |acc, &y| acc.add(ens.states()[y].matrix()));
            DensityMatrix::new(sum.scale(inv_k))
        })
        .collect::<Result<Vec<_>>>()?;
    let ensemble = ExclusionEnsemble::new(states, None, tol)?;
    Ok(Reformulation { ensemble, family })
}
