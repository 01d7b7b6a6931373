//! Dense complex linear algebra: Hermitian and unitary spectral
//! decompositions, the Cayley transform and functional calculus.

mod cayley;
mod eig;
mod matrix;

pub use cayley::{cayley, functional_calculus, inverse_cayley};
pub use eig::{
    hermitian_eig, hermitian_eig_with_threshold, hermitian_eigenvalues, lambda_min, operator_norm,
    smallest_singular_value, unitarity_defect, unitary_eig, unitary_eig_seeded, HermitianMatrix,
    SpectralDecomposition, UnitaryMatrix, CLUSTER_THRESHOLD, DEFAULT_PHASE_SEED, DEFAULT_TOL,
};
pub use matrix::{ComplexMatrix, C64, I};
