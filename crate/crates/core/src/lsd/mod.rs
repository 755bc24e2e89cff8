//! Lewenstein-Sanpera split `ρ = 𝒮·ϱ_sep + (1−𝒮)·ϱ_pure`
//! with maximal separable weight `𝒮`.
//!
//! Full-rank states are encoded on `[4,4,4]` blocks. Rank-3 states are first
//! rotated into the canonical frame of the pure state γ spanning their
//! kernel; product γ admits a closed form and otherwise a seven-variable
//! program. PPT inputs short-circuit to `𝒮 = 1`.

mod analytic;
mod encode;

pub use analytic::{analytic_parts, AnalyticParts, ANALYTIC_PSD_TOL};
pub use encode::{
    encode_full_rank, encode_rank3_entangled, encode_rank3_product, projected_pt, DualParts,
    LsdProgram, PRODUCT_GAMMA_TOL,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix};
use crate::sdp::{self, SdpSolution, SolverConfig};
use crate::two_qubit::{
    canonicalize_gamma, concurrence, gamma_basis, is_ppt, orthogonal_pure_state,
    partial_transpose_1, CanonicalGamma, DensityMatrix, GammaBasis, PureState,
};
use crate::verify::{self, VerifyOptions, WkReport};

/// PT eigenvalue tolerance for the separability short-circuit.
pub const PPT_TOL: f64 = 1e-10;
/// Largest second eigenvalue of `ρ − ϱ̃_sep` accepted as rank one.
pub const PURE_RANK_TOL: f64 = 1e-6;
/// Certificate slackness above which the SDP is solved again with
/// [`RETRY_STEP_FRACTION`]; the better of the two certificates is kept.
pub const RETRY_SLACKNESS: f64 = 1e-7;
pub const RETRY_STEP_FRACTION: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Separable,
    FullRank,
    Rank3EntangledGamma,
    Rank3ProductGamma,
    Rank3ProductGammaAnalytic,
}

impl CaseTag {
    pub const ALL: [CaseTag; 5] = [
        Self::Separable,
        Self::FullRank,
        Self::Rank3EntangledGamma,
        Self::Rank3ProductGamma,
        Self::Rank3ProductGammaAnalytic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Separable => "Separable",
            Self::FullRank => "FullRank",
            Self::Rank3EntangledGamma => "Rank3EntangledGamma",
            Self::Rank3ProductGamma => "Rank3ProductGamma",
            Self::Rank3ProductGammaAnalytic => "Rank3ProductGammaAnalytic",
        }
    }

    pub fn is_rank3(self) -> bool {
        matches!(self, Self::Rank3EntangledGamma | Self::Rank3ProductGamma | Self::Rank3ProductGammaAnalytic)
    }

    pub fn is_product_gamma(self) -> bool {
        matches!(self, Self::Rank3ProductGamma | Self::Rank3ProductGammaAnalytic)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown case tag {s:?}")))
    }
}

/// Which encoding the caller allows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CaseChoice {
    #[default]
    Auto,
    FullRank,
    Rank3,
}

#[derive(Clone, Debug)]
pub struct LsdOptions {
    pub solver: SolverConfig,
    pub case: CaseChoice,
    /// Try the closed form before the SDP when γ is a product state.
    pub analytic: bool,
    pub verify: VerifyOptions,
}

impl Default for LsdOptions {
    fn default() -> Self {
        Self { solver: SolverConfig::default(), case: CaseChoice::Auto, analytic: true, verify: VerifyOptions::default() }
    }
}

/// Encoded program and solver output, both in the canonical frame.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub program: LsdProgram,
    pub solution: SdpSolution,
}

/// All operators are in the caller's frame.
#[derive(Clone, Debug)]
pub struct LsdDecomposition {
    /// Degree of separability 𝒮.
    pub s: f64,
    /// `𝒮·ϱ_sep`.
    pub rho_sep_tilde: HermitianMatrix,
    /// `(1−𝒮)·ϱ_pure`; zero for separable input.
    pub rho_pure_tilde: HermitianMatrix,
    pub pure_vector: Option<PureState>,
    pub z1: HermitianMatrix,
    pub z2: HermitianMatrix,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub theta: Option<f64>,
    pub case: CaseTag,
    pub residuals: WkReport,
    /// Frame of the orthogonal pure state for rank-3 input.
    pub gamma: Option<CanonicalGamma>,
    pub certificate: Option<Certificate>,
}

impl LsdDecomposition {
    fn separable(rho: &DensityMatrix) -> Self {
        Self {
            s: 1.0,
            rho_sep_tilde: rho.matrix().clone(),
            rho_pure_tilde: HermitianMatrix::zeros(4),
            pure_vector: None,
            z1: HermitianMatrix::zeros(4),
            z2: HermitianMatrix::zeros(4),
            a: None,
            b: None,
            theta: None,
            case: CaseTag::Separable,
            residuals: WkReport::default(),
            gamma: None,
            certificate: None,
        }
    }

    /// Maps every operator from the canonical frame of `cg` back to the caller's.
    fn into_frame(mut self, cg: &CanonicalGamma) -> Self {
        let back = cg.frame().adjoint();
        for m in [&mut self.rho_sep_tilde, &mut self.rho_pure_tilde, &mut self.z1, &mut self.z2] {
            *m = m.conjugate_by(&back);
        }
        self.pure_vector = self.pure_vector.map(|v| v.transformed(&back).phase_fixed());
        self.gamma = Some(cg.clone());
        self
    }
}

/// `W` with `W + 1 ⪰ 0` and `tr{Wρ} = 𝒮 − 1`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub w: HermitianMatrix,
    pub case: CaseTag,
}

/// Γ₈ and Γ₉ of `cg` expressed in the caller's frame.
pub fn gamma_pair_in_frame(cg: &CanonicalGamma) -> (HermitianMatrix, HermitianMatrix) {
    let gb = gamma_basis(cg);
    let back = cg.frame().adjoint();
    (gb.gamma8().conjugate_by(&back), gb.gamma9().conjugate_by(&back))
}

/// `1 − |γ⟩⟨γ|` in the caller's frame.
pub fn support_projector(cg: &CanonicalGamma) -> HermitianMatrix {
    HermitianMatrix::identity(4).minus(&cg.input.projector())
}

/// `Z₁ + Z₂^T1` for full-rank states, `Z₁ + P₃Z₂^T1P₃` for rank-3 states,
/// plus `aΓ₈ + bΓ₉` when γ is a product state.
pub fn extract_witness(dec: &LsdDecomposition) -> Result<Witness> {
    let w = match dec.case {
        CaseTag::Separable => return Err(Error::SeparableInput),
        CaseTag::FullRank => dec.z1.plus(&partial_transpose_1(&dec.z2)),
        case => {
            let cg = dec
                .gamma
                .as_ref()
                .ok_or_else(|| Error::InvalidState(format!("{case} decomposition without γ frame")))?;
            let mut w = dec.z1.plus(&projected_pt(&dec.z2, &support_projector(cg)));
            if case.is_product_gamma() {
                let (g8, g9) = gamma_pair_in_frame(cg);
                w.add_scaled(dec.a.unwrap_or(0.0), &g8);
                w.add_scaled(dec.b.unwrap_or(0.0), &g9);
            }
            w
        }
    };
    Ok(Witness { w, case: dec.case })
}

/// `(1−𝒮)·C(ϱ_pure)`.
pub fn entanglement_measure(dec: &LsdDecomposition) -> f64 {
    match &dec.pure_vector {
        Some(v) if dec.case != CaseTag::Separable => (1.0 - dec.s) * concurrence(v),
        _ => 0.0,
    }
}

/// Top eigenpair of `ρ − ϱ̃_sep`, rejecting a second eigenvalue above [`PURE_RANK_TOL`].
fn pure_part(rho: &HermitianMatrix, sep: &HermitianMatrix) -> Result<(HermitianMatrix, PureState)> {
    let spec = eig_hermitian(&rho.minus(sep))?;
    let second = spec.values[2];
    if second > PURE_RANK_TOL {
        return Err(Error::NumericalFailure(format!("pure part has second eigenvalue {second:e}")));
    }
    let top = spec.max();
    let v = PureState::normalize(&spec.vector(3))?.phase_fixed();
    Ok((v.projector().scale(top), v))
}

fn solve_program(program: LsdProgram, rho: &HermitianMatrix, cfg: &SolverConfig) -> Result<LsdDecomposition> {
    let (x0, z0) = program.starting_point();
    let cfg = SolverConfig {
        initial_x: cfg.initial_x.clone().or(Some(x0)),
        initial_z: cfg.initial_z.clone().or(Some(z0)),
        ..cfg.clone()
    };
    let slackness = |sol: &SdpSolution| program.problem.eval(&sol.x).product_norm(&sol.z);
    let mut solution = sdp::solve(&program.problem, &cfg)?;
    // Iterates that stall off-centre near a non-strictly-complementary optimum
    // depend on the step length, so a shorter-stepped run usually avoids the stall.
    if slackness(&solution) > RETRY_SLACKNESS && cfg.step_fraction > RETRY_STEP_FRACTION {
        let retry = SolverConfig { step_fraction: RETRY_STEP_FRACTION, ..cfg.clone() };
        if let Ok(other) = sdp::solve(&program.problem, &retry) {
            if slackness(&other) < slackness(&solution) {
                solution = other;
            }
        }
    }
    let sep = program.separable_part(&solution.x);
    let (pure, v) = pure_part(rho, &sep)?;
    let duals = program.dual_parts(&solution.z);
    Ok(LsdDecomposition {
        s: sep.trace_re(),
        rho_sep_tilde: sep,
        rho_pure_tilde: pure,
        pure_vector: Some(v),
        z1: duals.z1,
        z2: duals.z2,
        a: duals.ab.map(|(a, _)| a),
        b: duals.ab.map(|(_, b)| b),
        theta: None,
        case: program.case,
        residuals: WkReport::default(),
        gamma: None,
        certificate: Some(Certificate { program, solution }),
    })
}

/// Closed-form decomposition of a rank-3 state already in the canonical
/// frame of a product γ; `None` when the implied separable part is not a
/// valid rank-3 separable operator.
pub fn analytic_rank3_product(rho: &DensityMatrix, gb: &GammaBasis) -> Option<LsdDecomposition> {
    let parts = analytic_parts(rho, gb)?;
    Some(LsdDecomposition {
        s: parts.s,
        rho_sep_tilde: parts.rho_sep,
        rho_pure_tilde: parts.rho_pure,
        pure_vector: Some(parts.psi.phase_fixed()),
        z1: HermitianMatrix::zeros(4),
        z2: HermitianMatrix::zeros(4),
        a: Some(parts.theta.cos()),
        b: Some(parts.theta.sin()),
        theta: Some(parts.theta),
        case: CaseTag::Rank3ProductGammaAnalytic,
        residuals: WkReport::default(),
        gamma: Some(CanonicalGamma::canonical(0.0)),
        certificate: None,
    })
}

/// Canonical frame of the pure state orthogonal to a rank-3 `ρ`, snapped to
/// an exact product state when its concurrence is at most [`PRODUCT_GAMMA_TOL`].
pub fn gamma_frame(rho: &DensityMatrix) -> Result<CanonicalGamma> {
    let cg = canonicalize_gamma(&orthogonal_pure_state(rho)?)?;
    Ok(if cg.q <= PRODUCT_GAMMA_TOL { cg.as_product() } else { cg })
}

/// `ρ` in the frame of `cg` with the Γ basis of that frame.
fn canonical_inputs(rho: &DensityMatrix, cg: &CanonicalGamma) -> (DensityMatrix, CanonicalGamma, GammaBasis) {
    let frame: ComplexMatrix = cg.frame();
    let local = CanonicalGamma::canonical(cg.q);
    let gb = gamma_basis(&local);
    (rho.conjugated(&frame), local, gb)
}

/// Re-encodes the program that produced a decomposition of the given case, or
/// `None` for the cases solved without an SDP.
pub fn program_for(rho: &DensityMatrix, case: CaseTag) -> Result<Option<LsdProgram>> {
    let program = match case {
        CaseTag::Separable | CaseTag::Rank3ProductGammaAnalytic => return Ok(None),
        CaseTag::FullRank => LsdProgram::full_rank(rho)?,
        CaseTag::Rank3EntangledGamma => {
            let (rho_c, local, gb) = canonical_inputs(rho, &gamma_frame(rho)?);
            LsdProgram::rank3_entangled(&rho_c, &local, &gb)?
        }
        CaseTag::Rank3ProductGamma => {
            let (rho_c, _, gb) = canonical_inputs(rho, &gamma_frame(rho)?);
            LsdProgram::rank3_product(&rho_c, &gb)?
        }
    };
    Ok(Some(program))
}

fn decompose_rank3(rho: &DensityMatrix, opts: &LsdOptions) -> Result<LsdDecomposition> {
    let cg = gamma_frame(rho)?;
    let (rho_c, local, gb) = canonical_inputs(rho, &cg);
    let dec = if cg.q == 0.0 {
        let closed = if opts.analytic { analytic_rank3_product(&rho_c, &gb) } else { None };
        match closed {
            Some(d) => d,
            None => solve_program(LsdProgram::rank3_product(&rho_c, &gb)?, &rho_c, &opts.solver)?,
        }
    } else {
        solve_program(LsdProgram::rank3_entangled(&rho_c, &local, &gb)?, &rho_c, &opts.solver)?
    };
    Ok(dec.into_frame(&cg))
}

/// Dispatches on PPT, rank and the type of γ without filling the residuals.
pub fn decompose_unverified(rho: &DensityMatrix, opts: &LsdOptions) -> Result<LsdDecomposition> {
    opts.solver.validate()?;
    if is_ppt(rho, PPT_TOL)? {
        return Ok(LsdDecomposition::separable(rho));
    }
    let rank = rho.rank()?;
    match (opts.case, rank) {
        (CaseChoice::Auto | CaseChoice::FullRank, 4) => {
            solve_program(LsdProgram::full_rank(rho)?, rho, &opts.solver)
        }
        (CaseChoice::Auto | CaseChoice::Rank3, 3) => decompose_rank3(rho, opts),
        (CaseChoice::FullRank, r) => Err(Error::RankMismatch { expected: 4, got: r }),
        (CaseChoice::Rank3, r) => Err(Error::RankMismatch { expected: 3, got: r }),
        (CaseChoice::Auto, r) => Err(Error::UnsupportedRank(r)),
    }
}

/// Optimal decomposition with its verification report in `residuals`.
pub fn decompose_with(rho: &DensityMatrix, opts: &LsdOptions) -> Result<LsdDecomposition> {
    let mut dec = decompose_unverified(rho, opts)?;
    dec.residuals = verify::verify(rho, &dec, &opts.verify)?;
    Ok(dec)
}

pub fn decompose(rho: &DensityMatrix, cfg: &SolverConfig) -> Result<LsdDecomposition> {
    decompose_with(rho, &LsdOptions { solver: cfg.clone(), ..LsdOptions::default() })
}
