use itertools::Itertools;

use crate::error::{Error, Result};
use crate::matop::{support_projector, HermitianMatrix, Tolerance};
use crate::quantum::DensityMatrix;
use crate::scalar::Real;

/// Labeled states `rho_0 .. rho_{N-1}` with priors and cached support projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionEnsemble<T: Real> {
    states: Vec<DensityMatrix<T>>,
    priors: Vec<T>,
    projectors: Vec<HermitianMatrix<T>>,
    dim: usize,
}

impl<T: Real> ExclusionEnsemble<T> {
    /// `priors = None` means uniform.
    pub fn new(states: Vec<DensityMatrix<T>>, priors: Option<Vec<T>>, tol: &Tolerance<T>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::EnsembleTooSmall(states.len()));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let n = states.len();
        let priors = match priors {
            None => vec![T::one() / T::from_count(n); n],
            Some(p) => {
                if p.len() != n {
                    return Err(Error::InvalidPriors(format!("{} priors for {} states", p.len(), n)));
                }
                if p.iter().any(|&x| x.is_nan() || x < T::zero()) {
                    return Err(Error::InvalidPriors("negative prior".into()));
                }
                let total: T = p.iter().copied().sum();
                if (total - T::one()).abs() > T::default_zero() {
                    return Err(Error::InvalidPriors(format!("priors sum to {total}")));
                }
                p
            }
        };
        let projectors = states
            .iter()
            .map(|s| support_projector(s.matrix(), tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            states,
            priors,
            projectors,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[DensityMatrix<T>] {
        &self.states
    }

    pub fn priors(&self) -> &[T] {
        &self.priors
    }

    /// Support projectors `Pi_x`.
    pub fn projectors(&self) -> &[HermitianMatrix<T>] {
        &self.projectors
    }

    /// `sum_x Pi_x`
    pub fn projector_sum(&self) -> HermitianMatrix<T> {
        self.projectors
            .iter()
            .fold(HermitianMatrix::zeros(self.dim), |acc, p| acc.add(p))
    }
}

/// `C(n, k)` without overflow for the sizes we care about.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `k`-subsets of `{0..n}` in lexicographic order, plus for every `x`
/// the positions of the subsets that contain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetFamily {
    pub n: usize,
    pub k: usize,
    pub subsets: Vec<Vec<usize>>,
    pub member_index: Vec<Vec<usize>>,
}

impl SubsetFamily {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidK { k, max: n });
        }
        let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
        let mut member_index = vec![Vec::new(); n];
        for (pos, s) in subsets.iter().enumerate() {
            for &x in s {
                member_index[x].push(pos);
            }
        }
        Ok(Self {
            n,
            k,
            subsets,
            member_index,
        })
    }

    /// Number of subsets `L = C(n, k)`.
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Position of a sorted subset.
    pub fn position(&self, subset: &[usize]) -> Option<usize> {
        self.subsets.binary_search_by(|s| s.as_slice().cmp(subset)).ok()
    }
}

/// `N = C(d, r)` states `Pi_x / r`, one per sorted `r`-subset of the computational basis.
pub fn subset_projector_ensemble<T: Real>(d: usize, r: usize, tol: &Tolerance<T>) -> Result<ExclusionEnsemble<T>> {
    if d < 2 || r == 0 || r >= d {
        return Err(Error::InvalidK { k: r, max: d.saturating_sub(1) });
    }
    let inv_r = T::one() / T::from_count(r);
    let states = (0..d)
        .combinations(r)
        .map(|subset| {
            let mut diag = vec![T::zero(); d];
            for i in subset {
                diag[i] = inv_r;
            }
            DensityMatrix::new(HermitianMatrix::from_real_diagonal(&diag))
        })
        .collect::<Result<Vec<_>>>()?;
    ExclusionEnsemble::new(states, None, tol)
}

/// The computational basis states `|0>, .., |d-1>`.
pub fn orthogonal_basis_ensemble<T: Real>(d: usize, tol: &Tolerance<T>) -> Result<ExclusionEnsemble<T>> {
    ExclusionEnsemble::new((0..d).map(|i| DensityMatrix::basis(d, i)).collect(), None, tol)
}
