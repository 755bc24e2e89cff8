//! Dense complex Hermitian linear algebra for the small fixed sizes used here
//! (at most 12×12 per matrix, 16×16 Newton systems).

mod eigen;
mod matrix;
mod solve;

pub use eigen::{
    eig_hermitian, frobenius_inner, is_psd, kron, kron_vec, min_eigenvalue, psd_sqrt, rank_eps,
    Spectrum,
};
pub use matrix::{
    embed, inner, normalized, restrict, vec_norm, ComplexMatrix, HermitianMatrix, C64,
    HERMITIAN_TOL, I, ONE, ZERO,
};
pub use solve::{cholesky, hpd_inverse, lower_inverse, solve_hermitian_linear};
