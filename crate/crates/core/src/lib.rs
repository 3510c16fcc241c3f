//! Channel analysis through Choi states, conclusive state-exclusion
//! feasibility, and the entanglement-assisted exclusion game whose success is
//! capped by the Choi rank.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the double-precision instantiation used by the CLI and file
//! formats.

pub mod cli;
pub mod densegame;
pub mod error;
pub mod exclusion;
pub mod io;
pub mod majorization;
pub mod matop;
pub mod quantum;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix = matop::ComplexMatrix<f64>;
pub type Hermitian = matop::HermitianMatrix<f64>;
pub type Tol = matop::Tolerance<f64>;
pub type State = quantum::DensityMatrix<f64>;
pub type Ket = quantum::PureState<f64>;
pub type Channel = quantum::KrausChannel<f64>;
pub type Choi = quantum::ChoiState<f64>;
pub type Povm = exclusion::Povm<f64>;
pub type Ensemble = exclusion::ExclusionEnsemble<f64>;
pub type Game = densegame::GameConfig<f64>;

pub type Matrix32 = matop::ComplexMatrix<f32>;
pub type State32 = quantum::DensityMatrix<f32>;
pub type Channel32 = quantum::KrausChannel<f32>;
pub type Choi32 = quantum::ChoiState<f32>;
pub type Povm32 = exclusion::Povm<f32>;
pub type Ensemble32 = exclusion::ExclusionEnsemble<f32>;
