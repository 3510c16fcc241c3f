//! Density matrices, Kraus channels and the Choi-Jamiolkowski machinery,
//! together with the Heisenberg-Weyl operators and the Bell basis they
//! generate.

mod channel;
mod state;
mod weyl;

pub use channel::{
    apply_kraus, apply_via_choi, choi_rank, choi_to_kraus, is_cptp, kraus_to_choi,
    make_dephasing, make_depolarizing, make_unitary_channel, reduced_state, ChoiState,
    CptpVerdict, KrausChannel,
};
pub use state::{DensityMatrix, PureState};
pub use weyl::{bell_state, max_entangled, root_of_unity, weyl, WeylIndex};

#[cfg(test)]
mod tests;
