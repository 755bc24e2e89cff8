//! Block-diagonal SDP encodings of the separable-weight maximization.

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, embed, restrict, ComplexMatrix, HermitianMatrix, C64};
use crate::sdp::{BlockLayout, BlockMatrix, SdpProblem};
use crate::two_qubit::{partial_transpose_1, pauli_basis, CanonicalGamma, DensityMatrix, GammaBasis};

use super::CaseTag;

/// Concurrence at or below which the orthogonal state counts as a product state.
pub const PRODUCT_GAMMA_TOL: f64 = 1e-9;
/// Largest admissible `⟨γ|ρ|γ⟩` for a state said to be in the canonical frame.
const FRAME_TOL: f64 = 1e-8;
/// Number of Γ components kept when γ is a product state.
const PRODUCT_VARS: usize = 7;

fn check_rank(rho: &DensityMatrix, want: usize) -> Result<()> {
    let got = rho.rank()?;
    if got != want {
        return Err(Error::RankMismatch { expected: want, got });
    }
    Ok(())
}

fn check_canonical(rho: &DensityMatrix, gb: &GammaBasis) -> Result<()> {
    let overlap = rho.expectation(gb.gamma.as_slice());
    if overlap.abs() > FRAME_TOL {
        return Err(Error::InvalidState(format!(
            "state is not orthogonal to the canonical γ (overlap {overlap:e})"
        )));
    }
    Ok(())
}

/// `c = (−1, 0, …, 0)`, so that `c·x = −λ`.
fn cost(m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m];
    c[0] = -1.0;
    c
}

fn herm(m: &ComplexMatrix) -> HermitianMatrix {
    HermitianMatrix::hermitize(m)
}

/// Layout `[4,4,4]`, `F_i = ¼·diag(E_i, E_i^T1, −E_i)`, `F₀ = diag(0, 0, ρ)`.
pub fn encode_full_rank(rho: &DensityMatrix) -> Result<SdpProblem> {
    check_rank(rho, 4)?;
    let layout = BlockLayout::new(vec![4, 4, 4])?;
    let f = pauli_basis()
        .elements()
        .iter()
        .map(|e| {
            BlockMatrix::new(vec![
                e.scale(0.25),
                partial_transpose_1(e).scale(0.25),
                e.scale(-0.25),
            ])
        })
        .collect();
    let f0 = BlockMatrix::new(vec![HermitianMatrix::zeros(4), HermitianMatrix::zeros(4), rho.matrix().clone()]);
    SdpProblem::new(layout, f0, f, cost(16))
}

fn rank3_blocks(
    rho: &DensityMatrix,
    gb: &GammaBasis,
    m: usize,
    middle: impl Fn(&HermitianMatrix) -> HermitianMatrix,
    middle_dim: usize,
) -> Result<SdpProblem> {
    let layout = BlockLayout::new(vec![3, middle_dim, 3])?;
    let third = 1.0 / 3.0;
    let f = (0..m)
        .map(|k| {
            let g = herm(&gb.restricted(k));
            BlockMatrix::new(vec![
                g.scale(third),
                middle(&partial_transpose_1(gb.get(k))).scale(third),
                g.scale(-third),
            ])
        })
        .collect();
    let f0 = BlockMatrix::new(vec![
        HermitianMatrix::zeros(3),
        HermitianMatrix::zeros(middle_dim),
        herm(&restrict(rho, &gb.support)),
    ]);
    SdpProblem::new(layout, f0, f, cost(m))
}

/// Layout `[3,4,3]`, `F_i = ⅓·diag(Γ_i|₃, Γ_i^T1, −Γ_i|₃)` for `i = 1..9`, with
/// the outer blocks written in [`GammaBasis::support`]. `ρ` must already be in
/// the canonical frame of `cg`.
pub fn encode_rank3_entangled(rho: &DensityMatrix, cg: &CanonicalGamma, gb: &GammaBasis) -> Result<SdpProblem> {
    check_rank(rho, 3)?;
    if cg.q <= PRODUCT_GAMMA_TOL || gb.q <= PRODUCT_GAMMA_TOL {
        return Err(Error::ProductGamma);
    }
    check_canonical(rho, gb)?;
    rank3_blocks(rho, gb, 9, |h| h.clone(), 4)
}

/// Product-γ variant: only `Γ_1..Γ_7` enter, and the middle block is written
/// in the support of `1 − γ^T1`, on which every `Γ_i^T1` with `i ≤ 7` lives.
/// The layout is therefore `[3,3,3]`.
pub fn encode_rank3_product(rho: &DensityMatrix, gb: &GammaBasis) -> Result<SdpProblem> {
    check_rank(rho, 3)?;
    if gb.q > PRODUCT_GAMMA_TOL {
        return Err(Error::EntangledGamma);
    }
    check_canonical(rho, gb)?;
    let pts = gb.pt_support()?;
    rank3_blocks(rho, gb, PRODUCT_VARS, |h| herm(&restrict(h, &pts)), 3)
}

/// Dual blocks mapped back to 4×4 operators in the frame of the program.
#[derive(Clone, Debug)]
pub struct DualParts {
    pub z1: HermitianMatrix,
    pub z2: HermitianMatrix,
    pub z3: HermitianMatrix,
    /// Γ₈ and Γ₉ weights of the product-γ dual identity.
    pub ab: Option<(f64, f64)>,
}

/// An encoded instance together with what is needed to read its solution.
#[derive(Clone, Debug)]
pub struct LsdProgram {
    pub case: CaseTag,
    pub problem: SdpProblem,
    /// Γ basis of the rank-3 encodings, in the canonical frame.
    pub basis: Option<GammaBasis>,
    /// Basis of the support of `1 − γ^T1` for the product-γ encoding.
    pub pt_support: Option<Vec<Vec<C64>>>,
    /// Smallest nonzero eigenvalue of the encoded state.
    lambda_min: f64,
}

impl LsdProgram {
    pub fn full_rank(rho: &DensityMatrix) -> Result<Self> {
        let problem = encode_full_rank(rho)?;
        let lambda_min = eig_hermitian(rho)?.min();
        Ok(Self { case: CaseTag::FullRank, problem, basis: None, pt_support: None, lambda_min })
    }

    pub fn rank3_entangled(rho: &DensityMatrix, cg: &CanonicalGamma, gb: &GammaBasis) -> Result<Self> {
        let problem = encode_rank3_entangled(rho, cg, gb)?;
        let lambda_min = support_min_eigenvalue(rho, gb)?;
        Ok(Self {
            case: CaseTag::Rank3EntangledGamma,
            problem,
            basis: Some(gb.clone()),
            pt_support: None,
            lambda_min,
        })
    }

    pub fn rank3_product(rho: &DensityMatrix, gb: &GammaBasis) -> Result<Self> {
        let problem = encode_rank3_product(rho, gb)?;
        let lambda_min = support_min_eigenvalue(rho, gb)?;
        Ok(Self {
            case: CaseTag::Rank3ProductGamma,
            problem,
            basis: Some(gb.clone()),
            pt_support: Some(gb.pt_support()?),
            lambda_min,
        })
    }

    /// `x₀ = (α, 0, …, 0)` with the separable trial part at half the smallest
    /// eigenvalue, and `Z₀ = diag(1, 1, 3·1)`.
    pub fn starting_point(&self) -> (Vec<f64>, BlockMatrix) {
        let m = self.problem.m();
        let dims = self.problem.layout().block_dims();
        let weight = if self.case == CaseTag::FullRank { 4.0 } else { 3.0 };
        let mut x = vec![0.0; m];
        x[0] = weight * 0.5 * self.lambda_min;
        let z = BlockMatrix::new(vec![
            HermitianMatrix::identity(dims[0]),
            HermitianMatrix::identity(dims[1]),
            HermitianMatrix::identity(dims[2]).scale(3.0),
        ]);
        (x, z)
    }

    /// `ϱ̃_sep` for a primal point, as a 4×4 operator.
    pub fn separable_part(&self, x: &[f64]) -> HermitianMatrix {
        match &self.basis {
            None => pauli_basis().combine(x),
            Some(gb) => gb.combine(x),
        }
    }

    pub fn dual_parts(&self, z: &BlockMatrix) -> DualParts {
        let Some(gb) = &self.basis else {
            return DualParts {
                z1: z.block(0).clone(),
                z2: z.block(1).clone(),
                z3: z.block(2).clone(),
                ab: None,
            };
        };
        let lift = |b: &HermitianMatrix, basis: &[Vec<C64>]| herm(&embed(b, basis));
        let z1 = lift(z.block(0), &gb.support);
        let z3 = lift(z.block(2), &gb.support);
        let z2 = match &self.pt_support {
            Some(pts) => lift(z.block(1), pts),
            None => z.block(1).clone(),
        };
        let ab = self.pt_support.as_ref().map(|_| {
            // Z₃ = Z₁ + Z₂∥^T1 + aΓ₈ + bΓ₉ + P₃ on the support.
            let d = z3.minus(&z1).minus(&projected_pt(&z2, &gb.p3)).minus(&gb.p3);
            let a = d.trace_product(gb.gamma8()).re / gb.norm_sq(7);
            let b = d.trace_product(gb.gamma9()).re / gb.norm_sq(8);
            (a, b)
        });
        DualParts { z1, z2, z3, ab }
    }
}

/// `P·Z^T1·P`.
pub fn projected_pt(z: &HermitianMatrix, p: &HermitianMatrix) -> HermitianMatrix {
    herm(&(&(&**p * &*partial_transpose_1(z)) * &**p))
}

fn support_min_eigenvalue(rho: &DensityMatrix, gb: &GammaBasis) -> Result<f64> {
    Ok(eig_hermitian(&herm(&restrict(rho, &gb.support)))?.min())
}
