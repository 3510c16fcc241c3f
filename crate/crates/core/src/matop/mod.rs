//! Dense complex matrix numerics: Hermitian eigendecomposition, rank and
//! support projectors, Kronecker products, partial traces and the Loewner
//! order.

mod bipartite;
mod hermitian;
mod matrix;

pub use bipartite::{partial_trace, tensor, tensor_vec, transpose_in_basis, Subsystem};
pub use hermitian::{
    eig_hermitian, eigenvalues, kernel_projector, loewner_leq, max_eigenvalue, min_eigenvalue,
    numerical_rank, spectral_map, support_projector, HermitianMatrix, Spectrum, Tolerance,
};
pub use matrix::ComplexMatrix;

#[cfg(test)]
mod tests;
