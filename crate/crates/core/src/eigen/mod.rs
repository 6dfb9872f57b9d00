//! Deterministic eigensolvers for the real symmetric matrices produced by the
//! Hamiltonian builders: tridiagonal sector matrices and banded full matrices.

mod banded;
mod convergence;
mod tridiagonal;

pub use banded::{eig_banded, eigenvalues_near, nearest_eigenpair, SymBandMatrix};
pub use convergence::{converged_spectrum, lowest_levels, ConvergedSpectrum, Model, FIRST_N_MAX, LAST_N_MAX};
pub use tridiagonal::{eig_tridiagonal, lowest_tridiagonal, tridiagonal_eigenvalue};

/// Eigenvalues in ascending order, with optional eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// `vectors[i]` belongs to `values[i]`.
    pub vectors: Option<Vec<Vec<f64>>>,
    /// Max `‖Av − λv‖` over the returned pairs, when vectors were computed.
    pub residual_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    /// Rayleigh quotient of `vector`.
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖Av − value·v‖`
    pub residual: f64,
}

/// Number of eigenvalues of a `dim`-dimensional truncation that are trusted.
/// The top 20% of a truncated spectrum is contaminated by the cut-off.
pub fn trusted_levels(dim: usize) -> usize {
    dim - dim / 5
}
