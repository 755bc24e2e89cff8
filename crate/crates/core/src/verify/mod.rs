//! Independent certification of a decomposition: validity of the parts, the
//! case-appropriate Wellens-Kuś equations, complementary slackness, the dual
//! identity for `Z₃`, and the witness properties.

mod witness;

pub use witness::{check_witness, product_grid, WitnessCheck, WitnessDomain, WitnessSampling};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, HermitianMatrix};
use crate::lsd::{extract_witness, projected_pt, CaseTag, LsdDecomposition, LsdProgram};
use crate::sdp::{dual_residuals, SdpSolution};
use crate::two_qubit::{partial_transpose_1, DensityMatrix};

pub const SUM_TOL: f64 = 1e-8;
pub const TRACE_TOL: f64 = 1e-8;
pub const PSD_TOL: f64 = 1e-8;
pub const RANK1_TOL: f64 = 1e-7;
pub const WK_TOL: f64 = 1e-6;
pub const Z3_TOL: f64 = 1e-6;
pub const SLACKNESS_TOL: f64 = 1e-6;
pub const BARELY_SEPARABLE_TOL: f64 = 1e-7;
pub const ANALYTIC_TOL: f64 = 1e-9;
pub const WITNESS_TRACE_TOL: f64 = 1e-7;
pub const WITNESS_SHIFT_TOL: f64 = 1e-8;
pub const WITNESS_MIN_TOL: f64 = 1e-6;
/// `tr{Z₂}` below which `μ̂ = tr{Z₁}/tr{Z₂}` is not reported.
const MU_HAT_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub witness_samples: usize,
    /// Points per Bloch angle of the witness grid; zero disables it.
    pub grid: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { witness_samples: 10_000, grid: 20, seed: 0 }
    }
}

/// Residuals of every optimality and validity condition. Fields that do not
/// apply to the case at hand are `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WkReport {
    /// `‖ϱ̃_sep + ϱ̃_pure − ρ‖_F`.
    pub sum_residual: f64,
    /// `|tr{ϱ̃_sep} − 𝒮|`.
    pub sep_trace_residual: f64,
    pub sep_min_eig: f64,
    pub sep_pt_min_eig: f64,
    pub pure_min_eig: f64,
    pub pure_second_eig: f64,
    pub wk1_residual: Option<f64>,
    pub wk2_residual: Option<f64>,
    /// `max(|a²+b²−1|, ‖Z₁‖_F, ‖Z₂‖_F)` for the closed-form case.
    pub analytic_residual: Option<f64>,
    pub z3_identity_residual: Option<f64>,
    pub slackness_residual: Option<f64>,
    pub witness_min_over_samples: Option<f64>,
    /// `|tr{Wρ} − (𝒮 − 1)|`.
    pub witness_trace_residual: Option<f64>,
    /// `λ_min(W + 1)`.
    pub witness_shift_min_eig: Option<f64>,
    pub mu_hat: Option<f64>,
    pub alpha_hat: Option<f64>,
    pub n_samples: usize,
    pub passed: bool,
}

impl WkReport {
    /// Names of the conditions that exceed their thresholds.
    pub fn failures(&self, case: CaseTag) -> Vec<&'static str> {
        let le = |v: Option<f64>, tol: f64| v.is_none_or(|v| v <= tol && !v.is_nan());
        let mut out = Vec::new();
        let mut need = |ok: bool, name: &'static str| {
            if !ok {
                out.push(name);
            }
        };
        need(self.sum_residual <= SUM_TOL, "sum_residual");
        need(self.sep_trace_residual <= TRACE_TOL, "sep_trace_residual");
        need(self.sep_min_eig >= -PSD_TOL, "sep_min_eig");
        need(self.sep_pt_min_eig >= -PSD_TOL, "sep_pt_min_eig");
        need(self.pure_min_eig >= -PSD_TOL, "pure_min_eig");
        need(self.pure_second_eig.abs() <= RANK1_TOL, "pure_second_eig");
        need(le(self.wk1_residual, WK_TOL), "wk1_residual");
        need(le(self.wk2_residual, WK_TOL), "wk2_residual");
        need(le(self.analytic_residual, ANALYTIC_TOL), "analytic_residual");
        need(le(self.z3_identity_residual, Z3_TOL), "z3_identity_residual");
        need(le(self.slackness_residual, SLACKNESS_TOL), "slackness_residual");
        need(le(self.witness_trace_residual, WITNESS_TRACE_TOL), "witness_trace_residual");
        need(self.witness_shift_min_eig.is_none_or(|v| v >= -WITNESS_SHIFT_TOL), "witness_shift_min_eig");
        need(self.witness_min_over_samples.is_none_or(|v| v >= -WITNESS_MIN_TOL), "witness_min_over_samples");
        if case != CaseTag::Separable {
            need(self.sep_pt_min_eig <= BARELY_SEPARABLE_TOL, "barely_separable");
            need(self.wk1_residual.is_some() && self.wk2_residual.is_some(), "wk_residuals_missing");
        }
        out
    }
}

/// Fills the validity fields: reconstruction, trace, and the spectra of the parts.
pub fn check_validity(rho: &DensityMatrix, dec: &LsdDecomposition) -> Result<WkReport> {
    let sep = &dec.rho_sep_tilde;
    let pure = &dec.rho_pure_tilde;
    let pure_spec = eig_hermitian(pure)?;
    Ok(WkReport {
        sum_residual: sep.plus(pure).minus(rho).frobenius_norm(),
        sep_trace_residual: (sep.trace_re() - dec.s).abs(),
        sep_min_eig: eig_hermitian(sep)?.min(),
        sep_pt_min_eig: eig_hermitian(&partial_transpose_1(sep))?.min(),
        pure_min_eig: pure_spec.min(),
        pure_second_eig: pure_spec.values[2],
        ..WkReport::default()
    })
}

/// Wellens-Kuś residuals and the recovered normalization scalars.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WkResiduals {
    /// `‖Wϱ̃_pure + ϱ̃_pure‖_F / ‖ϱ̃_pure‖_F`.
    pub wk1: f64,
    /// `‖ϱ̃_sep^T1·Z₂‖_F / max(1, ‖Z₂‖_F)`.
    pub wk2: f64,
    pub analytic: Option<f64>,
    pub mu_hat: Option<f64>,
    pub alpha_hat: f64,
}

fn wk_residuals(rho: &DensityMatrix, dec: &LsdDecomposition) -> Result<WkResiduals> {
    let w = extract_witness(dec)?.w;
    let pure = &dec.rho_pure_tilde;
    let pure_norm = pure.frobenius_norm();
    if pure_norm == 0.0 {
        return Err(Error::InvalidState("empty pure part in a non-separable decomposition".into()));
    }
    let lhs = &(&*w * &**pure) + &**pure;
    let wk1 = lhs.frobenius_norm() / pure_norm;
    let sep_pt = partial_transpose_1(&rho.minus(pure));
    let wk2 = (&*sep_pt * &*dec.z2).frobenius_norm() / dec.z2.frobenius_norm().max(1.0);
    let tr2 = dec.z2.trace_re();
    let mu_hat = (tr2 > MU_HAT_FLOOR).then(|| dec.z1.trace_re() / tr2);
    let alpha_hat = dec.pure_vector.as_ref().map_or(0.0, |v| w.expectation(v.as_slice()).abs());
    Ok(WkResiduals { wk1, wk2, analytic: None, mu_hat, alpha_hat })
}

fn wrong_case(case: CaseTag) -> Error {
    Error::WrongCase(case.to_string())
}

/// `(Z₁+Z₂^T1)ϱ̃_pure = −ϱ̃_pure` and `ϱ̃_sep^T1·Z₂ = 0`.
pub fn check_wk_full(rho: &DensityMatrix, dec: &LsdDecomposition) -> Result<WkResiduals> {
    if dec.case != CaseTag::FullRank {
        return Err(wrong_case(dec.case));
    }
    wk_residuals(rho, dec)
}

/// The rank-3 form with `Z₂∥^T1 = P₃Z₂^T1P₃` in place of `Z₂^T1`.
pub fn check_wk_rank3(rho: &DensityMatrix, dec: &LsdDecomposition) -> Result<WkResiduals> {
    if dec.case != CaseTag::Rank3EntangledGamma {
        return Err(wrong_case(dec.case));
    }
    wk_residuals(rho, dec)
}

/// The product-γ form with the extra `aΓ₈ + bΓ₉`; the closed-form case also
/// checks `Z₁ = Z₂ = 0` and `a² + b² = 1`.
pub fn check_wk_rank3_product(rho: &DensityMatrix, dec: &LsdDecomposition) -> Result<WkResiduals> {
    if !dec.case.is_product_gamma() {
        return Err(wrong_case(dec.case));
    }
    let mut r = wk_residuals(rho, dec)?;
    if dec.case == CaseTag::Rank3ProductGammaAnalytic {
        let (a, b) = (dec.a.unwrap_or(f64::INFINITY), dec.b.unwrap_or(f64::INFINITY));
        let norm = (a * a + b * b - 1.0).abs();
        r.analytic = Some(norm.max(dec.z1.frobenius_norm()).max(dec.z2.frobenius_norm()));
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlacknessResiduals {
    /// `‖F(x)Z‖_F`.
    pub slackness: f64,
    /// Norm of `Z₃ − Z₁ − Z₂^T1 − 1` or its rank-3 analogue.
    pub z3_identity: f64,
}

/// Recomputes `F(x)`, `‖F(x)Z‖_F` and the `Z₃` identity from the raw solution.
pub fn check_slackness_and_z3(program: &LsdProgram, sol: &SdpSolution) -> Result<SlacknessResiduals> {
    let report = dual_residuals(&program.problem, &sol.x, &sol.z)?;
    let d = program.dual_parts(&sol.z);
    let residual = match &program.basis {
        None => d.z3.minus(&d.z1).minus(&partial_transpose_1(&d.z2)).minus(&HermitianMatrix::identity(4)),
        Some(gb) => {
            let mut r = d.z3.minus(&d.z1).minus(&projected_pt(&d.z2, &gb.p3)).minus(&gb.p3);
            if let Some((a, b)) = d.ab {
                r.add_scaled(-a, gb.gamma8());
                r.add_scaled(-b, gb.gamma9());
            }
            r
        }
    };
    Ok(SlacknessResiduals { slackness: report.slackness_norm, z3_identity: residual.frobenius_norm() })
}

/// Whether `ϱ̃_sep` and `ρ − ϱ̃_sep` form a valid split: both PSD and `ϱ̃_sep` PPT.
pub fn is_valid_split(rho: &DensityMatrix, sep: &HermitianMatrix, tol: f64) -> Result<bool> {
    Ok(eig_hermitian(sep)?.min() >= -tol
        && eig_hermitian(&partial_transpose_1(sep))?.min() >= -tol
        && eig_hermitian(&rho.minus(sep))?.min() >= -tol)
}

/// Runs every check that applies to `dec.case` and sets `passed`.
pub fn verify(rho: &DensityMatrix, dec: &LsdDecomposition, opts: &VerifyOptions) -> Result<WkReport> {
    let mut report = check_validity(rho, dec)?;
    let wk = match dec.case {
        CaseTag::Separable => None,
        CaseTag::FullRank => Some(check_wk_full(rho, dec)?),
        CaseTag::Rank3EntangledGamma => Some(check_wk_rank3(rho, dec)?),
        CaseTag::Rank3ProductGamma | CaseTag::Rank3ProductGammaAnalytic => {
            Some(check_wk_rank3_product(rho, dec)?)
        }
    };
    if let Some(wk) = wk {
        report.wk1_residual = Some(wk.wk1);
        report.wk2_residual = Some(wk.wk2);
        report.analytic_residual = wk.analytic;
        report.mu_hat = wk.mu_hat;
        report.alpha_hat = Some(wk.alpha_hat);
    }
    if let Some(cert) = &dec.certificate {
        let sr = check_slackness_and_z3(&cert.program, &cert.solution)?;
        report.slackness_residual = Some(sr.slackness);
        report.z3_identity_residual = Some(sr.z3_identity);
    }
    if dec.case != CaseTag::Separable {
        let w = extract_witness(dec)?.w;
        let shifted = w.plus(&HermitianMatrix::identity(4));
        report.witness_shift_min_eig = Some(eig_hermitian(&shifted)?.min());
        let domain = match &dec.gamma {
            Some(cg) if dec.case.is_rank3() => WitnessDomain::OrthogonalTo(cg.input.clone()),
            _ => WitnessDomain::AllProducts,
        };
        let sampling = WitnessSampling { samples: opts.witness_samples, grid: opts.grid, seed: opts.seed };
        let wc = check_witness(&w, rho, &sampling, &domain)?;
        report.witness_min_over_samples = Some(wc.min_over_samples);
        report.witness_trace_residual = Some((wc.tr_w_rho - (dec.s - 1.0)).abs());
        report.n_samples = wc.n_evaluated;
    }
    report.passed = report.failures(dec.case).is_empty();
    Ok(report)
}

#[cfg(test)]
mod tests;
