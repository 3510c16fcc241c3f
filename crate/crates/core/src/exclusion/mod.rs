//! Conclusive state exclusion: POVM checks, weak and strong `k`-exclusion
//! verdicts, the projector-sum necessary condition and its max-relative
//! entropy relaxation, the `k -> 1` reformulation, and the explicit
//! constructions that saturate the condition.

mod bounds;
mod check;
mod ensemble;
mod povm;

pub use bounds::{
    corollary1_bounds, d_max, lemma1_feasible, lemma1_max_k, reformulate_k_to_1, saturation_povm,
    CorollaryBound, Lemma1Report, Reformulation, DEFAULT_REFORMULATION_CAP,
};
pub use check::{check_k_exclusion, exclusion_table, ExclusionMode, ExclusionTable, ExclusionVerdict};
pub use ensemble::{
    binomial, orthogonal_basis_ensemble, subset_projector_ensemble, ExclusionEnsemble, SubsetFamily,
};
pub use povm::{basis_povm, verify_povm, Label, Povm, PovmVerdict};
