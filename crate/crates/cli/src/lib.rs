//! `lsd` command-line front end: decompose, verify, witness, gen and batch.
//!
//! Exit codes are [`EXIT_PASS`], [`EXIT_ERROR`] and [`EXIT_FAILED`].

pub mod args;
pub mod json;
pub mod pretty;
pub mod report;

use std::ffi::OsString;
use std::path::Path;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use lsd_core::lsd::{decompose_with, extract_witness, CaseTag};
use lsd_core::two_qubit::{
    random_density, random_separable, rank3_entangled_gamma, rank3_product_gamma, werner_state, DensityMatrix,
};
use lsd_core::verify::{self, WITNESS_MIN_TOL, WITNESS_SHIFT_TOL, WITNESS_TRACE_TOL};
use rayon::prelude::*;
use thiserror::Error;

use args::{Basis, Cli, Command, Flags, GenArgs, GenKind, OutputFormat};
use json::{read_file, read_state, to_line, StateFile};
use report::{BatchRow, BatchSummary, Report, VerifyReport, WitnessReport, WkReportOut};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] lsd_core::Error),
    #[error("invalid report: {0}")]
    Report(String),
    #[error("{0}")]
    Usage(String),
}

/// Text for standard output and the exit code it goes with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn new(stdout: String, passed: bool) -> Self {
        Self { stdout, code: if passed { EXIT_PASS } else { EXIT_FAILED } }
    }
}

/// Parses `args` (program name first), runs the command, prints its output
/// and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_ERROR,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let flags = &cli.flags;
    if flags.basis == Basis::Magic && flags.output != OutputFormat::Pretty {
        return Err(CliError::Usage("--basis magic requires --output pretty".into()));
    }
    match &cli.command {
        Command::Decompose { state } => cmd_decompose(state, flags),
        Command::Verify { state, report } => cmd_verify(state, report, flags),
        Command::Witness { state } => cmd_witness(state, flags),
        Command::Gen(g) => cmd_gen(g, flags),
        Command::Batch { dir } => cmd_batch(dir, flags),
    }
}

fn line(mut s: String) -> String {
    s.push('\n');
    s
}

/// Decomposes and verifies one state; `timing_ms` covers both.
pub fn decompose_report(rho: &DensityMatrix, label: Option<String>, flags: &Flags) -> Result<Report, CliError> {
    let start = Instant::now();
    let dec = decompose_with(rho, &flags.lsd_options())?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    Report::new(&dec, label, ms)
}

fn cmd_decompose(path: &Path, flags: &Flags) -> Result<Outcome, CliError> {
    let (file, rho) = read_state(path)?;
    let r = decompose_report(&rho, file.label, flags)?;
    let text = match flags.output {
        OutputFormat::Json => line(to_line(&r)),
        OutputFormat::Pretty => pretty::report(&r, flags.basis),
    };
    Ok(Outcome::new(text, r.wk_report.passed))
}

fn cmd_verify(state: &Path, report_path: &Path, flags: &Flags) -> Result<Outcome, CliError> {
    let (file, rho) = read_state(state)?;
    let r: Report = json::parse(report_path, &read_file(report_path)?)?;
    let dec = r.decomposition(&rho)?;
    let wk = verify::verify(&rho, &dec, &flags.verify_options())?;
    let v = VerifyReport {
        state_label: file.label,
        report_label: r.label.clone(),
        case: dec.case.to_string(),
        s: dec.s,
        wk_report: WkReportOut::new(&wk, dec.case),
    };
    let text = match flags.output {
        OutputFormat::Json => line(to_line(&v)),
        OutputFormat::Pretty => pretty::verify(&v),
    };
    Ok(Outcome::new(text, wk.passed))
}

fn cmd_witness(path: &Path, flags: &Flags) -> Result<Outcome, CliError> {
    let (file, rho) = read_state(path)?;
    let dec = decompose_with(&rho, &flags.lsd_options())?;
    if dec.case == CaseTag::Separable {
        return Err(lsd_core::Error::SeparableInput.into());
    }
    let w = extract_witness(&dec)?.w;
    let res = &dec.residuals;
    let passed = res.witness_trace_residual.is_some_and(|v| v <= WITNESS_TRACE_TOL)
        && res.witness_shift_min_eig.is_some_and(|v| v >= -WITNESS_SHIFT_TOL)
        && res.witness_min_over_samples.is_some_and(|v| v >= -WITNESS_MIN_TOL);
    let r = WitnessReport {
        label: file.label,
        case: dec.case.to_string(),
        s: dec.s,
        witness: json::matrix_rows(&w),
        tr_w_rho: w.trace_product(&rho).re,
        witness_trace_residual: res.witness_trace_residual,
        witness_shift_min_eig: res.witness_shift_min_eig,
        witness_min_over_samples: res.witness_min_over_samples,
        n_samples: res.n_samples,
        passed,
    };
    let text = match flags.output {
        OutputFormat::Json => line(to_line(&r)),
        OutputFormat::Pretty => pretty::witness(&r, flags.basis),
    };
    Ok(Outcome::new(text, passed))
}

/// The state `gen` writes, with its default label.
pub fn generate(g: &GenArgs, seed: u64) -> Result<(DensityMatrix, String), CliError> {
    let reject = |name: &str, given: bool| -> Result<(), CliError> {
        if given {
            return Err(CliError::Usage(format!("--{name} does not apply to {:?} states", g.kind)));
        }
        Ok(())
    };
    let required = |name: &str| CliError::Usage(format!("{:?} states need --{name}", g.kind));
    match g.kind {
        GenKind::Werner => {
            reject("rank", g.rank.is_some())?;
            reject("terms", g.terms.is_some())?;
            let p = g.p.ok_or_else(|| required("p"))?;
            Ok((werner_state(p)?, format!("werner p={p}")))
        }
        GenKind::Random => {
            reject("p", g.p.is_some())?;
            reject("terms", g.terms.is_some())?;
            let rank = g.rank.ok_or_else(|| required("rank"))?;
            Ok((random_density(rank, seed)?, format!("random rank={rank} seed={seed}")))
        }
        GenKind::Separable => {
            reject("p", g.p.is_some())?;
            reject("rank", g.rank.is_some())?;
            let terms = g.terms.ok_or_else(|| required("terms"))?;
            Ok((random_separable(terms, seed)?, format!("separable terms={terms} seed={seed}")))
        }
        GenKind::Rank3ProductGamma | GenKind::Rank3EntangledGamma => {
            reject("p", g.p.is_some())?;
            reject("rank", g.rank.is_some())?;
            reject("terms", g.terms.is_some())?;
            if g.kind == GenKind::Rank3ProductGamma {
                Ok((rank3_product_gamma(seed)?, format!("rank3-product-gamma seed={seed}")))
            } else {
                Ok((rank3_entangled_gamma(seed)?, format!("rank3-entangled-gamma seed={seed}")))
            }
        }
    }
}

fn cmd_gen(g: &GenArgs, flags: &Flags) -> Result<Outcome, CliError> {
    let (rho, default_label) = generate(g, flags.seed)?;
    let file = StateFile::new(&rho, Some(g.label.clone().unwrap_or(default_label)));
    let text = line(to_line(&file));
    match &g.out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
            Ok(Outcome::new(String::new(), true))
        }
        None => Ok(Outcome::new(text, true)),
    }
}

/// `.json` files of `dir` sorted by name.
fn batch_files(dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    let io_err = |e| CliError::Io { path: dir.display().to_string(), source: e };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Reports for every file of `dir` in file-name order, decomposed in parallel.
pub fn batch_rows(dir: &Path, flags: &Flags) -> Result<Vec<BatchRow>, CliError> {
    let files = batch_files(dir)?;
    Ok(files
        .par_iter()
        .map(|path| {
            let file = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            let result = read_state(path).and_then(|(f, rho)| decompose_report(&rho, f.label, flags));
            match result {
                Ok(report) => BatchRow::Report { file, report: Box::new(report) },
                Err(e) => BatchRow::Error { file, error: e.to_string() },
            }
        })
        .collect())
}

fn cmd_batch(dir: &Path, flags: &Flags) -> Result<Outcome, CliError> {
    let rows = batch_rows(dir, flags)?;
    let summary = BatchSummary::from_rows(&rows);
    let text = match flags.output {
        OutputFormat::Json => {
            let mut out = String::new();
            for row in &rows {
                out.push_str(&line(to_line(row)));
            }
            out.push_str(&line(to_line(&serde_json::json!({ "summary": summary }))));
            out
        }
        OutputFormat::Pretty => pretty::batch(&rows, &summary),
    };
    Ok(Outcome::new(text, summary.failed == 0 && summary.errors == 0))
}
