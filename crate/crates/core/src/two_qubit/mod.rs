//! Two-qubit primitives: Pauli basis, partial transpose, states, and the
//! canonical frame for rank-3 states.

mod gamma;
mod generators;
mod pauli;
mod state;

pub use gamma::{
    canonical_gamma_projector, canonical_gamma_vector, canonicalize_gamma, gamma_basis, overlap,
    phi_plus, psi_plus, rotated_bell, CanonicalGamma, GammaBasis,
};
pub use generators::{
    analytic_product_sample, rank3_entangled_gamma, rank3_product_gamma, random_density,
    random_local_unitary, random_product_state, random_pure_state, random_separable,
    sample_local_unitary, sample_product_state, sample_pure_state, sample_qubit,
    sample_rank3_orthogonal, sample_unitary2, seeded_rng, singlet, werner_state,
    AnalyticProductSample,
};
pub use pauli::{
    from_magic, magic_matrix, partial_transpose_1, pauli, pauli_basis, sigma_tau, to_magic,
    PauliBasis,
};
pub use state::{
    concurrence, concurrence_mixed, is_ppt, orthogonal_pure_state, spin_flip, DensityMatrix,
    PureState, PSD_TOL, RANK_EPS, TRACE_TOL,
};
