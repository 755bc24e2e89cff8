//! Closed-form decomposition for rank-3 states orthogonal to a product state.

use crate::linalg::{eig_hermitian, rank_eps, HermitianMatrix};
use crate::two_qubit::{partial_transpose_1, rotated_bell, GammaBasis, PureState};

/// Eigenvalue slack allowed when accepting the closed-form separable part.
pub const ANALYTIC_PSD_TOL: f64 = 1e-10;
/// `√(g₈² + g₉²)` below which the closed form is not attempted.
const MIN_WEIGHT: f64 = 1e-12;

/// Parts of the closed-form decomposition, in the canonical frame.
#[derive(Clone, Debug)]
pub struct AnalyticParts {
    pub s: f64,
    pub theta: f64,
    pub rho_sep: HermitianMatrix,
    pub rho_pure: HermitianMatrix,
    pub psi: PureState,
}

/// `𝒮 = 1 − √(g₈²+g₉²)` with `g_k = tr{Γ_k ρ}` and pure part `ψ(θ)`,
/// `θ = atan2(−g₉, −g₈)`. Returns `None` unless the implied separable part is
/// PSD, PPT and of rank 3.
pub fn analytic_parts(rho: &HermitianMatrix, gb: &GammaBasis) -> Option<AnalyticParts> {
    let g8 = gb.gamma8().trace_product(rho).re;
    let g9 = gb.gamma9().trace_product(rho).re;
    let weight = g8.hypot(g9);
    if weight < MIN_WEIGHT {
        return None;
    }
    let s = 1.0 - weight;
    let theta = (-g9).atan2(-g8);
    let psi = rotated_bell(theta);
    let rho_pure = psi.projector().scale(weight);
    let rho_sep = rho.minus(&rho_pure);
    let tol = ANALYTIC_PSD_TOL;
    let sep_min = eig_hermitian(&rho_sep).ok()?.min();
    let pt_min = eig_hermitian(&partial_transpose_1(&rho_sep)).ok()?.min();
    if sep_min < -tol || pt_min < -tol || rank_eps(&rho_sep, 1e-9).ok()? != 3 {
        return None;
    }
    Some(AnalyticParts { s, theta, rho_sep, rho_pure, psi })
}
