//! Machine-readable reports and their reconstruction into decompositions.

use lsd_core::linalg::HermitianMatrix;
use lsd_core::lsd::{
    entanglement_measure, extract_witness, gamma_frame, program_for, CaseTag, Certificate, LsdDecomposition,
};
use lsd_core::sdp::{BlockMatrix, SdpSolution, SolveStatus};
use lsd_core::two_qubit::DensityMatrix;
use lsd_core::verify::WkReport;
use serde::{Deserialize, Serialize};

use crate::json::{hermitian_from_rows, matrix_rows, pure_from_entries, vector_entries, MatrixRows};
use crate::CliError;

/// Every field of [`WkReport`] plus the names of the failed checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WkReportOut {
    pub sum_residual: f64,
    pub sep_trace_residual: f64,
    pub sep_min_eig: f64,
    pub sep_pt_min_eig: f64,
    pub pure_min_eig: f64,
    pub pure_second_eig: f64,
    pub wk1_residual: Option<f64>,
    pub wk2_residual: Option<f64>,
    pub analytic_residual: Option<f64>,
    pub z3_identity_residual: Option<f64>,
    pub slackness_residual: Option<f64>,
    pub witness_min_over_samples: Option<f64>,
    pub witness_trace_residual: Option<f64>,
    pub witness_shift_min_eig: Option<f64>,
    pub mu_hat: Option<f64>,
    pub alpha_hat: Option<f64>,
    pub n_samples: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl WkReportOut {
    pub fn new(r: &WkReport, case: CaseTag) -> Self {
        Self {
            sum_residual: r.sum_residual,
            sep_trace_residual: r.sep_trace_residual,
            sep_min_eig: r.sep_min_eig,
            sep_pt_min_eig: r.sep_pt_min_eig,
            pure_min_eig: r.pure_min_eig,
            pure_second_eig: r.pure_second_eig,
            wk1_residual: r.wk1_residual,
            wk2_residual: r.wk2_residual,
            analytic_residual: r.analytic_residual,
            z3_identity_residual: r.z3_identity_residual,
            slackness_residual: r.slackness_residual,
            witness_min_over_samples: r.witness_min_over_samples,
            witness_trace_residual: r.witness_trace_residual,
            witness_shift_min_eig: r.witness_shift_min_eig,
            mu_hat: r.mu_hat,
            alpha_hat: r.alpha_hat,
            n_samples: r.n_samples,
            passed: r.passed,
            failures: r.failures(case).into_iter().map(String::from).collect(),
        }
    }
}

/// Raw SDP solution in the canonical frame of the program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOut {
    pub iterations: usize,
    pub gap: f64,
    pub status: String,
    pub p_star: f64,
    pub d_star: f64,
    pub x: Vec<f64>,
    pub z_blocks: Vec<MatrixRows>,
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "Optimal",
        SolveStatus::MaxIter => "MaxIter",
        SolveStatus::NumericalFailure => "NumericalFailure",
    }
}

fn parse_status(s: &str) -> Result<SolveStatus, CliError> {
    match s {
        "Optimal" => Ok(SolveStatus::Optimal),
        "MaxIter" => Ok(SolveStatus::MaxIter),
        "NumericalFailure" => Ok(SolveStatus::NumericalFailure),
        other => Err(CliError::Report(format!("unknown solver status {other:?}"))),
    }
}

impl SolverOut {
    fn new(sol: &SdpSolution) -> Self {
        Self {
            iterations: sol.iterations,
            gap: sol.gap,
            status: status_name(sol.status).into(),
            p_star: sol.p_star,
            d_star: sol.d_star,
            x: sol.x.clone(),
            z_blocks: sol.z.blocks().iter().map(|b| matrix_rows(b)).collect(),
        }
    }
}

/// Decomposition `ρ = S·ϱ_sep + (1−S)·ϱ_pure` with unit-trace parts, all
/// operators in the computational basis. `rho_pure`, `pure_vector` and
/// `witness` are null for separable input; `solver` is null when no SDP ran.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub label: Option<String>,
    pub case: String,
    #[serde(rename = "S")]
    pub s: f64,
    pub rho_sep: Option<MatrixRows>,
    pub rho_pure: Option<MatrixRows>,
    pub pure_vector: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub witness: Option<MatrixRows>,
    #[serde(default)]
    pub entanglement_measure: f64,
    pub z1: MatrixRows,
    pub z2: MatrixRows,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub theta: Option<f64>,
    #[serde(default)]
    pub wk_report: WkReportOut,
    pub solver: Option<SolverOut>,
    #[serde(default)]
    pub timing_ms: f64,
}

/// `m/w`, or `None` when the weight vanishes.
fn normalized_part(m: &HermitianMatrix, w: f64) -> Option<MatrixRows> {
    (w > 0.0).then(|| matrix_rows(&m.scale(1.0 / w)))
}

impl Report {
    pub fn new(dec: &LsdDecomposition, label: Option<String>, timing_ms: f64) -> Result<Self, CliError> {
        let witness = match dec.case {
            CaseTag::Separable => None,
            _ => Some(matrix_rows(&extract_witness(dec)?.w)),
        };
        Ok(Self {
            label,
            case: dec.case.to_string(),
            s: dec.s,
            rho_sep: normalized_part(&dec.rho_sep_tilde, dec.s),
            rho_pure: match dec.case {
                CaseTag::Separable => None,
                _ => normalized_part(&dec.rho_pure_tilde, 1.0 - dec.s),
            },
            pure_vector: dec.pure_vector.as_ref().map(|v| vector_entries(v.as_slice())),
            witness,
            entanglement_measure: entanglement_measure(dec),
            z1: matrix_rows(&dec.z1),
            z2: matrix_rows(&dec.z2),
            a: dec.a,
            b: dec.b,
            theta: dec.theta,
            wk_report: WkReportOut::new(&dec.residuals, dec.case),
            solver: dec.certificate.as_ref().map(|c| SolverOut::new(&c.solution)),
            timing_ms,
        })
    }

    /// Rebuilds the decomposition the report describes against `rho`. The Γ
    /// frame and the SDP are re-derived from `rho`; the reported residuals are
    /// ignored.
    pub fn decomposition(&self, rho: &DensityMatrix) -> Result<LsdDecomposition, CliError> {
        let case: CaseTag = self.case.parse()?;
        let part = |rows: &Option<MatrixRows>, w: f64| -> Result<HermitianMatrix, CliError> {
            match rows {
                Some(r) => Ok(hermitian_from_rows(r, 4)?.scale(w)),
                None => Ok(HermitianMatrix::zeros(4)),
            }
        };
        let gamma = if case.is_rank3() { Some(gamma_frame(rho)?) } else { None };
        let certificate = match program_for(rho, case)? {
            None => None,
            Some(program) => {
                let out = self
                    .solver
                    .as_ref()
                    .ok_or_else(|| CliError::Report(format!("case {case} needs the solver certificate")))?;
                let dims = program.problem.layout().block_dims().to_vec();
                if out.z_blocks.len() != dims.len() {
                    return Err(lsd_core::Error::DimMismatch { expected: dims.len(), got: out.z_blocks.len() }.into());
                }
                if out.x.len() != program.problem.m() {
                    return Err(lsd_core::Error::DimMismatch { expected: program.problem.m(), got: out.x.len() }.into());
                }
                let blocks = out
                    .z_blocks
                    .iter()
                    .zip(&dims)
                    .map(|(rows, &d)| hermitian_from_rows(rows, d))
                    .collect::<Result<Vec<_>, _>>()?;
                let z = BlockMatrix::new(blocks);
                let solution = SdpSolution {
                    p_star: program.problem.objective(&out.x),
                    d_star: program.problem.dual_objective(&z),
                    gap: program.problem.eval(&out.x).trace_product(&z),
                    x: out.x.clone(),
                    z,
                    iterations: out.iterations,
                    status: parse_status(&out.status)?,
                    history: Vec::new(),
                };
                Some(Certificate { program, solution })
            }
        };
        Ok(LsdDecomposition {
            s: self.s,
            rho_sep_tilde: part(&self.rho_sep, self.s)?,
            rho_pure_tilde: part(&self.rho_pure, 1.0 - self.s)?,
            pure_vector: self.pure_vector.as_deref().map(pure_from_entries).transpose()?,
            z1: hermitian_from_rows(&self.z1, 4)?,
            z2: hermitian_from_rows(&self.z2, 4)?,
            a: self.a,
            b: self.b,
            theta: self.theta,
            case,
            residuals: WkReport::default(),
            gamma,
            certificate,
        })
    }
}

/// Output of `verify`: residuals recomputed from the state and the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub state_label: Option<String>,
    pub report_label: Option<String>,
    pub case: String,
    #[serde(rename = "S")]
    pub s: f64,
    pub wk_report: WkReportOut,
}

/// Output of `witness`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub label: Option<String>,
    pub case: String,
    #[serde(rename = "S")]
    pub s: f64,
    pub witness: MatrixRows,
    pub tr_w_rho: f64,
    pub witness_trace_residual: Option<f64>,
    pub witness_shift_min_eig: Option<f64>,
    pub witness_min_over_samples: Option<f64>,
    pub n_samples: usize,
    pub passed: bool,
}

/// One line of `batch` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BatchRow {
    Report { file: String, report: Box<Report> },
    Error { file: String, error: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MaxResiduals {
    pub sum_residual: f64,
    pub wk1_residual: f64,
    pub wk2_residual: f64,
    pub z3_identity_residual: f64,
    pub slackness_residual: f64,
    pub witness_trace_residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub count: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub max_residuals: MaxResiduals,
}

impl BatchSummary {
    pub fn from_rows(rows: &[BatchRow]) -> Self {
        let mut s = Self { count: rows.len(), ..Self::default() };
        for row in rows {
            match row {
                BatchRow::Error { .. } => s.errors += 1,
                BatchRow::Report { report, .. } => {
                    let w = &report.wk_report;
                    if w.passed {
                        s.passed += 1;
                    } else {
                        s.failed += 1;
                    }
                    let m = &mut s.max_residuals;
                    let up = |acc: &mut f64, v: Option<f64>| *acc = acc.max(v.unwrap_or(0.0));
                    up(&mut m.sum_residual, Some(w.sum_residual));
                    up(&mut m.wk1_residual, w.wk1_residual);
                    up(&mut m.wk2_residual, w.wk2_residual);
                    up(&mut m.z3_identity_residual, w.z3_identity_residual);
                    up(&mut m.slackness_residual, w.slackness_residual);
                    up(&mut m.witness_trace_residual, w.witness_trace_residual);
                }
            }
        }
        s
    }
}
