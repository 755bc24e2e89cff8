//! Human-readable layout. Matrices may be shown in the magic basis here,
//! never in JSON output.

use std::fmt::Write;

use lsd_core::linalg::{ComplexMatrix, C64};
use lsd_core::two_qubit::magic_matrix;

use crate::args::Basis;
use crate::json::MatrixRows;
use crate::report::{BatchRow, BatchSummary, Report, VerifyReport, WitnessReport, WkReportOut};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), num)
}

fn complex(z: [f64; 2]) -> String {
    format!("{:+.16e}{:+.16e}i", z[0], z[1])
}

fn to_complex(rows: &MatrixRows) -> ComplexMatrix {
    let n = rows.len();
    ComplexMatrix::from_fn(n, |i, j| C64::new(rows[i][j][0], rows[i][j][1]))
}

fn in_basis(rows: &MatrixRows, basis: Basis) -> MatrixRows {
    match basis {
        Basis::Computational => rows.clone(),
        Basis::Magic => {
            let m = magic_matrix();
            let a = &(&m.adjoint() * &to_complex(rows)) * &m;
            (0..a.dim()).map(|i| a.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
        }
    }
}

fn vector_in_basis(v: &[[f64; 2]], basis: Basis) -> Vec<[f64; 2]> {
    match basis {
        Basis::Computational => v.to_vec(),
        Basis::Magic => {
            let c: Vec<C64> = v.iter().map(|z| C64::new(z[0], z[1])).collect();
            magic_matrix().adjoint().matvec(&c).iter().map(|z| [z.re, z.im]).collect()
        }
    }
}

fn matrix(out: &mut String, name: &str, rows: Option<&MatrixRows>, basis: Basis) {
    let Some(rows) = rows else {
        let _ = writeln!(out, "{name:<22}-");
        return;
    };
    let _ = writeln!(out, "{name}");
    for r in in_basis(rows, basis) {
        let cells: Vec<String> = r.into_iter().map(complex).collect();
        let _ = writeln!(out, "  {}", cells.join("  "));
    }
}

fn field(out: &mut String, name: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{name:<22}{value}");
}

fn wk_lines(out: &mut String, w: &WkReportOut) {
    let _ = writeln!(out, "checks");
    let rows = [
        ("sum_residual", Some(w.sum_residual)),
        ("sep_trace_residual", Some(w.sep_trace_residual)),
        ("sep_min_eig", Some(w.sep_min_eig)),
        ("sep_pt_min_eig", Some(w.sep_pt_min_eig)),
        ("pure_min_eig", Some(w.pure_min_eig)),
        ("pure_second_eig", Some(w.pure_second_eig)),
        ("wk1_residual", w.wk1_residual),
        ("wk2_residual", w.wk2_residual),
        ("analytic_residual", w.analytic_residual),
        ("z3_identity_residual", w.z3_identity_residual),
        ("slackness_residual", w.slackness_residual),
        ("witness_min", w.witness_min_over_samples),
        ("witness_trace_residual", w.witness_trace_residual),
        ("witness_shift_min_eig", w.witness_shift_min_eig),
        ("mu_hat", w.mu_hat),
        ("alpha_hat", w.alpha_hat),
    ];
    for (name, v) in rows {
        let _ = writeln!(out, "  {name:<24}{}", opt(v));
    }
    let _ = writeln!(out, "  {:<24}{}", "n_samples", w.n_samples);
    let verdict = if w.passed { "yes".to_string() } else { format!("no ({})", w.failures.join(", ")) };
    field(out, "passed", verdict);
}

fn label(l: &Option<String>) -> &str {
    l.as_deref().unwrap_or("-")
}

pub fn report(r: &Report, basis: Basis) -> String {
    let mut out = String::new();
    field(&mut out, "label", label(&r.label));
    field(&mut out, "case", &r.case);
    field(&mut out, "S", num(r.s));
    field(&mut out, "entanglement_measure", num(r.entanglement_measure));
    field(&mut out, "basis", format!("{basis:?}").to_lowercase());
    matrix(&mut out, "rho_sep", r.rho_sep.as_ref(), basis);
    matrix(&mut out, "rho_pure", r.rho_pure.as_ref(), basis);
    match &r.pure_vector {
        Some(v) => {
            let cells: Vec<String> = vector_in_basis(v, basis).into_iter().map(complex).collect();
            field(&mut out, "pure_vector", cells.join("  "));
        }
        None => field(&mut out, "pure_vector", "-"),
    }
    matrix(&mut out, "witness", r.witness.as_ref(), basis);
    matrix(&mut out, "z1", Some(&r.z1), basis);
    matrix(&mut out, "z2", Some(&r.z2), basis);
    field(&mut out, "a", opt(r.a));
    field(&mut out, "b", opt(r.b));
    field(&mut out, "theta", opt(r.theta));
    match &r.solver {
        Some(s) => field(
            &mut out,
            "solver",
            format!("{} after {} iterations, gap {}", s.status, s.iterations, num(s.gap)),
        ),
        None => field(&mut out, "solver", "-"),
    }
    wk_lines(&mut out, &r.wk_report);
    field(&mut out, "timing_ms", format!("{:.3}", r.timing_ms));
    out
}

pub fn verify(r: &VerifyReport) -> String {
    let mut out = String::new();
    field(&mut out, "state", label(&r.state_label));
    field(&mut out, "report", label(&r.report_label));
    field(&mut out, "case", &r.case);
    field(&mut out, "S", num(r.s));
    wk_lines(&mut out, &r.wk_report);
    out
}

pub fn witness(r: &WitnessReport, basis: Basis) -> String {
    let mut out = String::new();
    field(&mut out, "label", label(&r.label));
    field(&mut out, "case", &r.case);
    field(&mut out, "S", num(r.s));
    matrix(&mut out, "witness", Some(&r.witness), basis);
    field(&mut out, "tr_w_rho", num(r.tr_w_rho));
    field(&mut out, "trace_residual", opt(r.witness_trace_residual));
    field(&mut out, "shift_min_eig", opt(r.witness_shift_min_eig));
    field(&mut out, "min_over_products", opt(r.witness_min_over_samples));
    field(&mut out, "n_samples", r.n_samples);
    field(&mut out, "passed", if r.passed { "yes" } else { "no" });
    out
}

pub fn batch(rows: &[BatchRow], summary: &BatchSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<32}{:<28}{:<26}result", "file", "case", "S");
    for row in rows {
        let _ = match row {
            BatchRow::Report { file, report } => {
                let verdict = if report.wk_report.passed { "pass" } else { "FAIL" };
                writeln!(out, "{file:<32}{:<28}{:<26}{verdict}", report.case, num(report.s))
            }
            BatchRow::Error { file, error } => writeln!(out, "{file:<32}{:<28}{:<26}error: {error}", "-", "-"),
        };
    }
    let m = &summary.max_residuals;
    let _ = writeln!(
        out,
        "{} files: {} passed, {} failed, {} errors; max sum {}, wk1 {}, wk2 {}, z3 {}, slackness {}, witness trace {}",
        summary.count,
        summary.passed,
        summary.failed,
        summary.errors,
        num(m.sum_residual),
        num(m.wk1_residual),
        num(m.wk2_residual),
        num(m.z3_identity_residual),
        num(m.slackness_residual),
        num(m.witness_trace_residual),
    );
    out
}
