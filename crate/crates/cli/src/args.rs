use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lsd_core::lsd::{CaseChoice, LsdOptions};
use lsd_core::sdp::SolverConfig;
use lsd_core::verify::VerifyOptions;

#[derive(Debug, Parser)]
#[command(name = "lsd", version, about = "Largest-weight separable split of two-qubit density matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose one state file and print its report.
    Decompose { state: PathBuf },
    /// Recompute every residual of a report against its state file.
    Verify { state: PathBuf, report: PathBuf },
    /// Decompose a state and check the extracted entanglement witness.
    Witness { state: PathBuf },
    /// Write a generated state file.
    Gen(GenArgs),
    /// Decompose every `.json` file of a directory.
    Batch { dir: PathBuf },
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub kind: GenKind,
    /// Singlet weight of a Werner state.
    #[arg(long)]
    pub p: Option<f64>,
    /// Rank of a random state.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Number of product terms of a separable mixture.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Werner,
    Random,
    Separable,
    Rank3ProductGamma,
    Rank3EntangledGamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Auto,
    Full,
    Rank3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    Computational,
    Magic,
}

#[derive(Debug, Args)]
pub struct Flags {
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_gap: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_feas: f64,
    #[arg(long, global = true, default_value_t = 200)]
    pub max_iter: usize,
    /// Random product states sampled by the witness check.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    /// Seed of the witness sampler, and of the generator for `gen`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = CaseArg::Auto)]
    pub case: CaseArg,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Basis of the matrices in pretty output.
    #[arg(long, global = true, value_enum, default_value_t = Basis::Computational)]
    pub basis: Basis,
}

impl Flags {
    pub fn lsd_options(&self) -> LsdOptions {
        let case = match self.case {
            CaseArg::Auto => CaseChoice::Auto,
            CaseArg::Full => CaseChoice::FullRank,
            CaseArg::Rank3 => CaseChoice::Rank3,
        };
        LsdOptions {
            solver: SolverConfig {
                tol_gap: self.tol_gap,
                tol_feas: self.tol_feas,
                max_iter: self.max_iter,
                ..SolverConfig::default()
            },
            case,
            verify: self.verify_options(),
            ..LsdOptions::default()
        }
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions { witness_samples: self.samples, seed: self.seed, ..VerifyOptions::default() }
    }
}
