//! Acceptance gate: every criterion at its stated tolerance, one line each.
//! Exits nonzero when any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use lsd_cli::args::Flags;
use lsd_cli::json::{to_line, StateFile};
use lsd_cli::report::Report;
use lsd_core::linalg::{eig_hermitian, rank_eps, HermitianMatrix};
use lsd_core::lsd::{decompose_unverified, decompose_with, extract_witness, CaseTag, LsdDecomposition, LsdOptions};
use lsd_core::sdp::dual_residuals;
use lsd_core::two_qubit::{
    analytic_product_sample, concurrence, is_ppt, partial_transpose_1, random_density, random_local_unitary,
    random_pure_state, random_separable, rank3_entangled_gamma, rank3_product_gamma, singlet, werner_state,
    DensityMatrix, RANK_EPS,
};
use lsd_core::verify::{self, check_witness, VerifyOptions, WitnessDomain, WitnessSampling};
use rayon::prelude::*;

const PER_FAMILY: usize = 50;
const ANALYTIC_SAMPLES: u64 = 30;
const PURE_SAMPLES: u64 = 100;
const LOCAL_UNITARIES: u64 = 20;
const WERNER_P: [f64; 5] = [0.4, 0.5, 2.0 / 3.0, 0.8, 0.95];

struct Case {
    name: String,
    rho: DensityMatrix,
    dec: LsdDecomposition,
}

struct Corpus {
    werner: Vec<Case>,
    full: Vec<Case>,
    entangled_gamma: Vec<Case>,
    product_gamma: Vec<Case>,
    analytic: Vec<(Case, f64)>,
}

impl Corpus {
    fn entangled(&self) -> impl Iterator<Item = &Case> {
        self.werner
            .iter()
            .chain(&self.full)
            .chain(&self.entangled_gamma)
            .chain(&self.product_gamma)
            .chain(self.analytic.iter().map(|(c, _)| c))
    }
}

fn decompose(name: String, rho: DensityMatrix) -> Case {
    let dec = decompose_with(&rho, &LsdOptions::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
    Case { name, rho, dec }
}

/// First `PER_FAMILY` NPT states of a seeded family, seeds counted from zero.
fn family(tag: &str, make: impl Fn(u64) -> lsd_core::Result<DensityMatrix> + Sync) -> Vec<Case> {
    let mut states = Vec::new();
    let mut seed = 0u64;
    while states.len() < PER_FAMILY {
        let rho = make(seed).expect("generator");
        if !is_ppt(&rho, lsd_core::lsd::PPT_TOL).expect("ppt") {
            states.push((format!("{tag} seed={seed}"), rho));
        }
        seed += 1;
    }
    states.into_par_iter().map(|(n, r)| decompose(n, r)).collect()
}

fn build_corpus() -> Corpus {
    let werner = WERNER_P
        .par_iter()
        .map(|&p| decompose(format!("werner p={p}"), werner_state(p).expect("werner")))
        .collect();
    let analytic = (0..ANALYTIC_SAMPLES)
        .into_par_iter()
        .map(|seed| {
            let sample = analytic_product_sample(seed).expect("analytic sample");
            (decompose(format!("analytic seed={seed}"), sample.rho), sample.s)
        })
        .collect();
    Corpus {
        werner,
        full: family("full-rank", |s| random_density(4, s)),
        entangled_gamma: family("rank3-entangled-gamma", rank3_entangled_gamma),
        product_gamma: family("rank3-product-gamma", rank3_product_gamma),
        analytic,
    }
}

/// Largest observed value of a residual and the offending cases.
struct Tally {
    what: &'static str,
    tol: f64,
    worst: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new(what: &'static str, tol: f64) -> Self {
        Self { what, tol, worst: 0.0, failures: Vec::new() }
    }

    /// Records `value`, which must not exceed the tolerance.
    fn at_most(&mut self, name: &str, value: f64) {
        self.worst = self.worst.max(value);
        if !(value <= self.tol) {
            self.failures.push(format!("{name}: {} {value:.3e}", self.what));
        }
    }

    fn summary(&self) -> String {
        format!("max {} {:.2e} (tol {:.0e})", self.what, self.worst, self.tol)
    }
}

type Outcome = Result<String, String>;

fn combine(tallies: &[Tally], extra: &str) -> Outcome {
    let text: Vec<String> = tallies.iter().map(Tally::summary).collect();
    let mut text = text.join(", ");
    if !extra.is_empty() {
        text = format!("{extra}; {text}");
    }
    let failures: Vec<&String> = tallies.iter().flat_map(|t| &t.failures).collect();
    if failures.is_empty() {
        Ok(text)
    } else {
        let shown: Vec<&str> = failures.iter().take(4).map(|s| s.as_str()).collect();
        Err(format!("{text}; {} failing: {}", failures.len(), shown.join("; ")))
    }
}

fn werner_oracle(c: &Corpus) -> Outcome {
    let mut s = Tally::new("|S - 3(1-p)/2|", 1e-6);
    let mut fid = Tally::new("1 - singlet fidelity", 1e-6);
    let mut sep = Tally::new("|rho_sep - werner(1/3)|_F", 1e-6);
    let target = werner_state(1.0 / 3.0).expect("werner");
    for (case, p) in c.werner.iter().zip(WERNER_P) {
        let d = &case.dec;
        s.at_most(&case.name, (d.s - 1.5 * (1.0 - p)).abs());
        let f = d.pure_vector.as_ref().map_or(0.0, |v| v.fidelity(&singlet()));
        fid.at_most(&case.name, 1.0 - f);
        sep.at_most(&case.name, d.rho_sep_tilde.scale(1.0 / d.s).minus(&target).frobenius_norm());
    }
    combine(&[s, fid, sep], "")
}

fn separable_boundary() -> Outcome {
    let opts = LsdOptions::default();
    let mut problems = Vec::new();
    let mut states = vec![("werner p=1/3".to_string(), werner_state(1.0 / 3.0).expect("werner"))];
    for seed in 0..20 {
        states.push((format!("separable seed={seed}"), random_separable(2 + (seed as usize % 5), seed).expect("sep")));
    }
    for (name, rho) in &states {
        let d = decompose_with(rho, &opts).map_err(|e| e.to_string())?;
        if d.s != 1.0 || d.case != CaseTag::Separable {
            problems.push(format!("{name}: S = {:.17} case {}", d.s, d.case));
        }
    }
    let p = 1.0 / 3.0 + 1e-3;
    let d = decompose_with(&werner_state(p).expect("werner"), &opts).map_err(|e| e.to_string())?;
    let dev = (d.s - (1.0 - 1.5e-3)).abs();
    if dev > 1e-6 {
        problems.push(format!("werner p=1/3+1e-3: S = {:.12} off by {dev:.3e}", d.s));
    }
    let text = format!("{} PPT states at S = 1 exactly; just past the boundary |S - (1 - 1.5e-3)| = {dev:.2e}", states.len());
    if problems.is_empty() {
        Ok(text)
    } else {
        Err(format!("{text}; {}", problems.join("; ")))
    }
}

fn certificates(c: &Corpus) -> Outcome {
    let mut gap = Tally::new("|gap|", 1e-9);
    let mut eq = Tally::new("dual equality residual", 1e-9);
    let mut slack = Tally::new("slackness", 1e-6);
    let mut solved = 0;
    for case in c.entangled() {
        let Some(cert) = &case.dec.certificate else { continue };
        solved += 1;
        let r = dual_residuals(&cert.program.problem, &cert.solution.x, &cert.solution.z).map_err(|e| e.to_string())?;
        gap.at_most(&case.name, r.gap.abs());
        eq.at_most(&case.name, r.eq_residual_max);
        slack.at_most(&case.name, case.dec.residuals.slackness_residual.unwrap_or(f64::INFINITY));
    }
    combine(&[gap, eq, slack], &format!("{solved} SDP certificates"))
}

fn wk_conditions(c: &Corpus) -> Outcome {
    let mut tallies = Vec::new();
    for (what, cases) in [
        ("full-rank wk", &c.full),
        ("entangled-gamma wk", &c.entangled_gamma),
        ("product-gamma wk", &c.product_gamma),
    ] {
        let mut t = Tally::new(what, 1e-6);
        for case in cases {
            let r = &case.dec.residuals;
            let wk = r.wk1_residual.unwrap_or(f64::INFINITY).max(r.wk2_residual.unwrap_or(f64::INFINITY));
            t.at_most(&case.name, wk);
        }
        tallies.push(t);
    }
    combine(&tallies, &format!("{} states per family", PER_FAMILY))
}

fn ppt_boundary(c: &Corpus) -> Outcome {
    let mut t = Tally::new("lambda_min(rho_sep^T1)", 1e-7);
    for case in c.entangled() {
        let pt = partial_transpose_1(&case.dec.rho_sep_tilde);
        let m = eig_hermitian(&pt).map_err(|e| e.to_string())?.min();
        t.at_most(&case.name, m);
    }
    combine(&[t], "")
}

fn full_rank_sep_means_maximal_pure(c: &Corpus) -> Outcome {
    let mut t = Tally::new("1 - C(pure)", 1e-6);
    let mut rank4 = 0;
    for case in c.entangled() {
        if rank_eps(&case.dec.rho_sep_tilde, RANK_EPS).map_err(|e| e.to_string())? == 4 {
            rank4 += 1;
            let q = case.dec.pure_vector.as_ref().map_or(0.0, concurrence);
            t.at_most(&case.name, 1.0 - q);
        }
    }
    if rank4 == 0 {
        return Err("no output had a rank-4 separable part".into());
    }
    combine(&[t], &format!("{rank4} rank-4 separable parts"))
}

fn analytic_product(c: &Corpus) -> Outcome {
    let mut vs_sdp = Tally::new("|S_closed - S_sdp|", 1e-6);
    let mut vs_built = Tally::new("|S_closed - S_built|", 1e-6);
    let mut unit = Tally::new("|a^2 + b^2 - 1|", 1e-9);
    let mut conc = Tally::new("1 - C(pure)", 1e-8);
    let fallback = LsdOptions { analytic: false, ..LsdOptions::default() };
    let mut wrong_case = Vec::new();
    for (case, built) in &c.analytic {
        let d = &case.dec;
        if d.case != CaseTag::Rank3ProductGammaAnalytic {
            wrong_case.push(format!("{}: case {}", case.name, d.case));
            continue;
        }
        let sdp = decompose_unverified(&case.rho, &fallback).map_err(|e| e.to_string())?;
        vs_sdp.at_most(&case.name, (d.s - sdp.s).abs());
        vs_built.at_most(&case.name, (d.s - built).abs());
        let (a, b) = (d.a.unwrap_or(f64::NAN), d.b.unwrap_or(f64::NAN));
        unit.at_most(&case.name, (a * a + b * b - 1.0).abs());
        conc.at_most(&case.name, 1.0 - d.pure_vector.as_ref().map_or(0.0, concurrence));
    }
    let out = combine(&[vs_sdp, vs_built, unit, conc], &format!("{} closed-form states", c.analytic.len()));
    match (out, wrong_case.is_empty()) {
        (Ok(t), true) => Ok(t),
        (Ok(t) | Err(t), _) => Err(format!("{t}; {}", wrong_case.join("; "))),
    }
}

fn pure_state_spectra() -> Outcome {
    let mut t = Tally::new("spectrum deviation", 1e-9);
    for seed in 0..PURE_SAMPLES {
        let psi = random_pure_state(seed);
        let q = concurrence(&psi);
        let p = (1.0 - q * q).max(0.0).sqrt();
        let mut expected = [0.5 * (1.0 + p), 0.5 * (1.0 - p), 0.5 * q, -0.5 * q];
        expected.sort_by(f64::total_cmp);
        let got = eig_hermitian(&partial_transpose_1(&psi.projector())).map_err(|e| e.to_string())?;
        let mut values = got.values.clone();
        values.sort_by(f64::total_cmp);
        let dev = values.iter().zip(&expected).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        t.at_most(&format!("pure seed={seed}"), dev);
    }
    combine(&[t], &format!("{PURE_SAMPLES} pure states"))
}

fn inflated_weight_is_rejected(c: &Corpus) -> Outcome {
    let opts = VerifyOptions::default();
    let mut accepted = Vec::new();
    let mut n = 0;
    for case in c.entangled() {
        let d = &case.dec;
        let s = d.s + 1e-3;
        let sep = d.rho_sep_tilde.scale(s / d.s);
        let pure = case.rho.minus(&sep);
        let split_ok = verify::is_valid_split(&case.rho, &sep, verify::PSD_TOL).map_err(|e| e.to_string())?;
        let forged = LsdDecomposition { s, rho_sep_tilde: sep, rho_pure_tilde: pure, ..d.clone() };
        let report = verify::verify(&case.rho, &forged, &opts).map_err(|e| e.to_string())?;
        n += 1;
        if split_ok || report.passed {
            accepted.push(case.name.clone());
        }
    }
    if accepted.is_empty() {
        Ok(format!("{n} inflated decompositions all rejected"))
    } else {
        Err(format!("{} of {n} inflated decompositions accepted: {}", accepted.len(), accepted.join(", ")))
    }
}

fn witnesses(c: &Corpus) -> Outcome {
    let mut trace = Tally::new("|tr(W rho) - (S - 1)|", 1e-7);
    let mut shift = Tally::new("-lambda_min(W + 1)", 1e-8);
    let mut min = Tally::new("-min over products", 1e-6);
    let sampling = WitnessSampling { samples: 10_000, grid: 20, seed: 7 };
    let mut orthogonal = 0;
    let mut evaluated = 0;
    for case in c.entangled() {
        let d = &case.dec;
        let w = extract_witness(d).map_err(|e| e.to_string())?.w;
        trace.at_most(&case.name, (w.trace_product(&case.rho).re - (d.s - 1.0)).abs());
        let shifted = w.plus(&HermitianMatrix::identity(4));
        shift.at_most(&case.name, -eig_hermitian(&shifted).map_err(|e| e.to_string())?.min());
        let domain = match &d.gamma {
            Some(cg) if d.case.is_rank3() => {
                orthogonal += 1;
                WitnessDomain::OrthogonalTo(cg.input.clone())
            }
            _ => WitnessDomain::AllProducts,
        };
        let wc = check_witness(&w, &case.rho, &sampling, &domain).map_err(|e| e.to_string())?;
        evaluated += wc.n_evaluated;
        min.at_most(&case.name, -wc.min_over_samples);
    }
    let extra = format!("{evaluated} product evaluations, {orthogonal} rank-3 witnesses checked on products orthogonal to gamma");
    combine(&[trace, shift, min], &extra)
}

fn local_unitary_invariance(c: &Corpus) -> Outcome {
    let opts = &LsdOptions::default();
    let cases: Vec<&Case> = c.full.iter().chain(&c.entangled_gamma).chain(&c.product_gamma).chain(&c.werner).collect();
    let devs: Vec<Result<(String, f64), String>> = cases
        .par_iter()
        .flat_map_iter(|case| {
            (0..LOCAL_UNITARIES).map(move |k| {
                let u = random_local_unitary(1000 + k);
                let rotated = case.rho.conjugated(&u);
                let d = decompose_unverified(&rotated, opts).map_err(|e| format!("{} U{k}: {e}", case.name))?;
                Ok((format!("{} U{k}", case.name), (d.s - case.dec.s).abs()))
            })
        })
        .collect();
    let mut t = Tally::new("|S(U rho U^+) - S(rho)|", 1e-7);
    for r in devs {
        let (name, dev) = r?;
        t.at_most(&name, dev);
    }
    combine(&[t], &format!("{} states x {LOCAL_UNITARIES} local unitaries", cases.len()))
}

fn default_flags() -> Flags {
    use clap::Parser;
    lsd_cli::args::Cli::try_parse_from(["lsd", "decompose", "-"]).expect("default flags").flags
}

fn without_timing(line: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(line).expect("report json");
    v.as_object_mut().expect("object").remove("timing_ms");
    v.to_string()
}

fn run_lsd(args: &[&std::ffi::OsStr]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lsd")).args(args).output().map_err(|e| e.to_string())?;
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let states = [
        ("werner.json", werner_state(0.8).expect("werner")),
        ("full.json", random_density(4, 3).expect("full")),
        ("entangled.json", rank3_entangled_gamma(5).expect("rank3")),
        ("product.json", rank3_product_gamma(2).expect("rank3")),
        ("analytic.json", analytic_product_sample(4).expect("analytic").rho),
        ("separable.json", random_separable(3, 1).expect("sep")),
    ];
    let flags = default_flags();
    let mut differ = Vec::new();
    for (file, rho) in &states {
        let path = dir.path().join(file);
        std::fs::write(&path, to_line(&StateFile::new(rho, Some(file.to_string())))).map_err(|e| e.to_string())?;
        let lib = |_| -> Result<String, String> {
            let r: Report = lsd_cli::decompose_report(rho, Some(file.to_string()), &flags).map_err(|e| e.to_string())?;
            Ok(without_timing(&to_line(&r)))
        };
        let bin = |p: &Path| -> Result<String, String> {
            Ok(without_timing(run_lsd(&["decompose".as_ref(), p.as_os_str()])?.trim()))
        };
        let runs = [lib(0)?, lib(1)?, bin(&path)?, bin(&path)?];
        if runs.iter().any(|r| r != &runs[0]) {
            differ.push(file.to_string());
        }
    }
    let batch = || -> Result<Vec<String>, String> {
        let text = run_lsd(&["batch".as_ref(), dir.path().as_os_str()])?;
        Ok(text
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).expect("batch json");
                if let Some(r) = v.get_mut("report").and_then(|r| r.as_object_mut()) {
                    r.remove("timing_ms");
                }
                v.to_string()
            })
            .collect())
    };
    let (b1, b2) = (batch()?, batch()?);
    if b1 != b2 || b1.len() != states.len() + 1 {
        differ.push("batch".into());
    }
    let text = format!("{} states: library and binary reports identical across runs, batch identical", states.len());
    if differ.is_empty() {
        Ok(text)
    } else {
        Err(format!("reports differ for {}", differ.join(", ")))
    }
}

fn main() {
    let start = Instant::now();
    let corpus = build_corpus();
    let built = start.elapsed().as_secs_f64();
    println!("corpus decomposed and verified in {built:.1} s");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("Werner decomposition", Box::new(|| werner_oracle(&corpus))),
        ("separable boundary", Box::new(separable_boundary)),
        ("SDP certificates", Box::new(|| certificates(&corpus))),
        ("optimality conditions", Box::new(|| wk_conditions(&corpus))),
        ("separable part on the PPT boundary", Box::new(|| ppt_boundary(&corpus))),
        ("rank-4 separable part forces a maximally entangled pure part", Box::new(|| full_rank_sep_means_maximal_pure(&corpus))),
        ("closed form for product gamma", Box::new(|| analytic_product(&corpus))),
        ("partial-transpose spectrum of pure states", Box::new(pure_state_spectra)),
        ("inflated weight rejected", Box::new(|| inflated_weight_is_rejected(&corpus))),
        ("entanglement witness", Box::new(|| witnesses(&corpus))),
        ("local-unitary invariance", Box::new(|| local_unitary_invariance(&corpus))),
        ("deterministic reports", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1} s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {detail}", k + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    let within = total < 60.0;
    println!("{} total {total:.1} s (limit 60 s)", if within { "PASS" } else { "FAIL" });
    if failed > 0 || !within {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
