use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matop::{eigenvalues, ComplexMatrix, HermitianMatrix, Tolerance};
use crate::scalar::Real;

/// Outcome label of a POVM effect.
///
/// A plain index carries no claim about which states the outcome excludes.
/// A subset label `Y` asserts that the effect excludes every state in `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Index(usize),
    Subset(Vec<usize>),
}

impl Label {
    pub fn subset(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        Label::Subset(members)
    }

    /// The index a plain label carries, or the members of a subset label.
    pub fn members(&self) -> Vec<usize> {
        match self {
            Label::Index(i) => vec![*i],
            Label::Subset(s) => s.clone(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(i) => write!(f, "{i}"),
            Label::Subset(s) => write!(f, "{s:?}"),
        }
    }
}

/// Finite list of effects with labels.
///
/// Construction only checks shapes and label uniqueness, so invalid
/// measurements can be represented and diagnosed with [`verify_povm`].
#[derive(Debug, Clone, PartialEq)]
pub struct Povm<T: Real> {
    effects: Vec<HermitianMatrix<T>>,
    labels: Vec<Label>,
    dim: usize,
}

impl<T: Real> Povm<T> {
    /// `labels = None` numbers the effects `0..n`.
    pub fn new(effects: Vec<HermitianMatrix<T>>, labels: Option<Vec<Label>>) -> Result<Self> {
        let dim = effects.first().ok_or(Error::InvalidDimension(0))?.dim();
        if let Some(bad) = effects.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let labels: Vec<Label> = match labels {
            Some(l) if l.len() != effects.len() => {
                return Err(Error::DimensionMismatch {
                    expected: effects.len(),
                    found: l.len(),
                })
            }
            Some(l) => l
                .into_iter()
                .map(|lab| match lab {
                    Label::Subset(s) => Label::subset(s),
                    other => other,
                })
                .collect(),
            None => (0..effects.len()).map(Label::Index).collect(),
        };
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        Ok(Self { effects, labels, dim })
    }

    pub fn effects(&self) -> &[HermitianMatrix<T>] {
        &self.effects
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn relabeled(&self, labels: Vec<Label>) -> Result<Self> {
        Self::new(self.effects.clone(), Some(labels))
    }

    /// True when at least one label is a subset label, i.e. the labels make exclusion claims.
    pub fn has_subset_labels(&self) -> bool {
        self.labels.iter().any(|l| matches!(l, Label::Subset(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PovmVerdict<T: Real> {
    pub valid: bool,
    /// Smallest eigenvalue over all effects.
    pub min_eigenvalue: T,
    /// Spectral norm of `sum_a T_a - I`.
    pub completeness_residual: T,
}

/// Checks `T_a >= 0` (within `psd_slack`) and `sum_a T_a = I` (within the identity slack).
pub fn verify_povm<T: Real>(p: &Povm<T>, tol: &Tolerance<T>) -> PovmVerdict<T> {
    let min_eigenvalue = p
        .effects
        .iter()
        .map(|e| eigenvalues(e).min())
        .fold(T::infinity(), T::min);
    let mut sum = ComplexMatrix::zeros(p.dim, p.dim);
    for e in &p.effects {
        sum = &sum + e.as_matrix();
    }
    let diff = HermitianMatrix::symmetrized(&(&sum - &ComplexMatrix::identity(p.dim)));
    let spec = eigenvalues(&diff);
    let completeness_residual = spec.max().abs().max(spec.min().abs());
    PovmVerdict {
        valid: min_eigenvalue >= -tol.psd_slack && completeness_residual <= T::identity_slack(),
        min_eigenvalue,
        completeness_residual,
    }
}

/// Computational-basis measurement `{|i><i|}` with labels `0..d`.
pub fn basis_povm<T: Real>(d: usize) -> Povm<T> {
    let effects = (0..d)
        .map(|i| HermitianMatrix::new(ComplexMatrix::unit(d, i, i)).expect("diagonal unit"))
        .collect();
    Povm::new(effects, None).expect("basis effects share a dimension")
}
