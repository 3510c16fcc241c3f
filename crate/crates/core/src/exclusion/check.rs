use itertools::Itertools;
use serde::Serialize;

use super::{ExclusionEnsemble, Label, Povm, SubsetFamily};
use crate::error::{Error, Result};
use crate::matop::Tolerance;
use crate::scalar::Real;

/// `tr[T_a rho_x]` for every outcome/state pair, and what each outcome rules out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionTable<T: Real> {
    /// `probabilities[a][x] = tr[T_a rho_x]`
    pub probabilities: Vec<Vec<T>>,
    /// States `x` with `tr[T_a rho_x] <= trace_zero`, ascending.
    pub excluded: Vec<Vec<usize>>,
    /// `sum_x tr[T_a rho_x]` per outcome.
    pub outcome_weight: Vec<T>,
    /// Outcomes whose total weight is at most `trace_zero`; these never fire.
    pub null_outcomes: Vec<usize>,
}

pub fn exclusion_table<T: Real>(
    povm: &Povm<T>,
    ens: &ExclusionEnsemble<T>,
    tol: &Tolerance<T>,
) -> Result<ExclusionTable<T>> {
    if povm.dim() != ens.dim() {
        return Err(Error::DimensionMismatch {
            expected: ens.dim(),
            found: povm.dim(),
        });
    }
    let probabilities: Vec<Vec<T>> = povm
        .effects()
        .iter()
        .map(|e| ens.states().iter().map(|s| e.trace_product(s.matrix())).collect())
        .collect();
    let excluded = probabilities
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &p)| p <= tol.trace_zero)
                .map(|(x, _)| x)
                .collect()
        })
        .collect();
    let outcome_weight: Vec<T> = probabilities.iter().map(|row| row.iter().copied().sum()).collect();
    let null_outcomes = outcome_weight
        .iter()
        .enumerate()
        .filter(|(_, &w)| w <= tol.trace_zero)
        .map(|(a, _)| a)
        .collect();
    Ok(ExclusionTable {
        probabilities,
        excluded,
        outcome_weight,
        null_outcomes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExclusionMode {
    /// Every outcome that can occur excludes at least `k` states.
    Weak,
    /// The outcomes are in bijection with all `k`-subsets, each excluding its
    /// subset, and every outcome occurs with nonzero probability.
    Strong,
}

impl std::str::FromStr for ExclusionMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "weak" => Ok(Self::Weak),
            "strong" => Ok(Self::Strong),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionVerdict<T: Real> {
    pub feasible: bool,
    pub mode: ExclusionMode,
    pub k: usize,
    /// Per-outcome excluded states; present iff feasible.
    pub witness: Option<Vec<Vec<usize>>>,
    /// Strong mode: the `k`-subset each outcome is responsible for.
    pub assignment: Option<Vec<Vec<usize>>>,
    /// Largest `tr[T_a rho_y]` over the pairs that must vanish.
    pub residual: T,
    /// Smallest `sum_x tr[T_a rho_x]` over outcomes.
    pub min_outcome_weight: T,
    pub reason: Option<String>,
}

/// Checks whether a given POVM performs conclusive `k`-state exclusion.
///
/// Priors play no role. In strong mode, subset labels are checked as given
/// and must be exactly the `C(N, k)` family; with plain index labels any
/// bijection between outcomes and subsets is searched for.
pub fn check_k_exclusion<T: Real>(
    povm: &Povm<T>,
    ens: &ExclusionEnsemble<T>,
    k: usize,
    mode: ExclusionMode,
    tol: &Tolerance<T>,
) -> Result<ExclusionVerdict<T>> {
    let n = ens.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidK { k, max: n - 1 });
    }
    let table = exclusion_table(povm, ens, tol)?;
    let min_outcome_weight = table.outcome_weight.iter().copied().fold(T::infinity(), T::min);
    match mode {
        ExclusionMode::Weak => Ok(weak(&table, k, min_outcome_weight)),
        ExclusionMode::Strong => strong(povm, &table, n, k, min_outcome_weight, tol),
    }
}

fn kth_smallest<T: Real>(row: &[T], k: usize) -> T {
    let mut sorted = row.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite probabilities"));
    sorted[k - 1]
}

fn weak<T: Real>(table: &ExclusionTable<T>, k: usize, min_outcome_weight: T) -> ExclusionVerdict<T> {
    let live: Vec<usize> = (0..table.probabilities.len())
        .filter(|a| !table.null_outcomes.contains(a))
        .collect();
    let residual = live
        .iter()
        .map(|&a| kth_smallest(&table.probabilities[a], k))
        .fold(T::zero(), T::max);
    let short = live.iter().find(|&&a| table.excluded[a].len() < k);
    let feasible = short.is_none() && !live.is_empty();
    ExclusionVerdict {
        feasible,
        mode: ExclusionMode::Weak,
        k,
        witness: feasible.then(|| table.excluded.clone()),
        assignment: None,
        residual,
        min_outcome_weight,
        reason: short.map(|a| {
            format!(
                "outcome {a} excludes only {} state(s)",
                table.excluded[*a].len()
            )
        }),
    }
}

fn strong<T: Real>(
    povm: &Povm<T>,
    table: &ExclusionTable<T>,
    n: usize,
    k: usize,
    min_outcome_weight: T,
    tol: &Tolerance<T>,
) -> Result<ExclusionVerdict<T>> {
    let family = SubsetFamily::new(n, k)?;
    let verdict = |feasible: bool, assignment: Option<Vec<Vec<usize>>>, residual: T, reason: Option<String>| {
        ExclusionVerdict {
            feasible,
            mode: ExclusionMode::Strong,
            k,
            witness: feasible.then(|| table.excluded.clone()),
            assignment: if feasible { assignment } else { None },
            residual,
            min_outcome_weight,
            reason,
        }
    };
    let residual_for = |assignment: &[Vec<usize>]| {
        assignment
            .iter()
            .enumerate()
            .flat_map(|(a, ys)| ys.iter().map(move |&y| table.probabilities[a][y]))
            .fold(T::zero(), T::max)
    };

    let assignment: Vec<Vec<usize>> = if povm.has_subset_labels() {
        let subsets: Vec<Vec<usize>> = povm.labels().iter().map(Label::members).collect();
        let mut sorted = subsets.clone();
        sorted.sort();
        if sorted != family.subsets {
            return Err(Error::LabelMismatch { n, k });
        }
        subsets
    } else {
        if povm.len() != family.len() {
            let fallback = (0..povm.len())
                .filter(|a| !table.null_outcomes.contains(a))
                .map(|a| kth_smallest(&table.probabilities[a], k))
                .fold(T::zero(), T::max);
            return Ok(verdict(
                false,
                None,
                fallback,
                Some(format!(
                    "{} outcomes cannot cover the {} subsets of size {k}",
                    povm.len(),
                    family.len()
                )),
            ));
        }
        match match_outcomes(&table.excluded, &family) {
            Some(a) => a,
            None => {
                return Ok(verdict(
                    false,
                    None,
                    T::zero(),
                    Some("no bijection between outcomes and excludable subsets".into()),
                ))
            }
        }
    };

    let residual = residual_for(&assignment);
    if residual > tol.trace_zero {
        return Ok(verdict(false, None, residual, Some("an outcome fails to exclude its subset".into())));
    }
    if let Some(a) = table.null_outcomes.first() {
        return Ok(verdict(
            false,
            None,
            residual,
            Some(format!("outcome {a} never occurs")),
        ));
    }
    Ok(verdict(true, Some(assignment), residual, None))
}

/// Perfect matching between outcomes and subsets (augmenting paths).
fn match_outcomes(excluded: &[Vec<usize>], family: &SubsetFamily) -> Option<Vec<Vec<usize>>> {
    let adjacency: Vec<Vec<usize>> = excluded
        .iter()
        .map(|ex| {
            ex.iter()
                .copied()
                .combinations(family.k)
                .filter_map(|s| family.position(&s))
                .collect()
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; family.len()];

    fn augment(a: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &y in &adj[a] {
            if seen[y] {
                continue;
            }
            seen[y] = true;
            if owner[y].is_none_or(|b| augment(b, adj, seen, owner)) {
                owner[y] = Some(a);
                return true;
            }
        }
        false
    }

    for a in 0..adjacency.len() {
        let mut seen = vec![false; family.len()];
        if !augment(a, &adjacency, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut assignment = vec![Vec::new(); adjacency.len()];
    for (y, a) in owner.iter().enumerate() {
        if let Some(a) = a {
            assignment[*a] = family.subsets[y].clone();
        }
    }
    Some(assignment)
}
