//! Command-line front end.
//!
//! Exit codes: 0 when every applicable check holds, 1 when a violation is
//! witnessed, 2 for usage errors, malformed input and exhausted budgets.

pub mod campaign;
pub mod search;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::constructions::{self, ClaimCheck, ConstructionError, ConstructionRequest};
use crate::format::{self, FormatError, Provenance, ReportFile, SubspaceFile};
use crate::formcore::Side;
use crate::gf::{FieldSpec, GfError};
use crate::spanspace::{FormSubspace, Kind, RankCount, SpanError, DEFAULT_BUDGET};
use crate::theoremlab::{run_suite, SuiteOptions, Verdict, VerificationReport, CHECKERS};

pub use campaign::{Campaign, GridSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("{0}")]
    Usage(String),
    #[error("violation witnessed")]
    Violation,
    #[error("budget exceeded")]
    Budget,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation | CliError::Construction(ConstructionError::VerificationFailed(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bilrank", version, about = "Constant rank subspaces of bilinear forms over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a catalogue construction and write it as a subspace file.
    Construct(ConstructArgs),
    /// Print dimension, spectrum, radical and isotropic statistics.
    Analyze(AnalyzeArgs),
    /// Run theorem checkers and emit a report.
    Verify(VerifyArgs),
    /// Re-derive every witness of a report from its subspace file.
    Replay(ReplayArgs),
    /// Seeded searches for objects that are asserted to exist.
    Search(search::SearchArgs),
    /// Construct and verify a whole parameter grid.
    Campaign(campaign::CampaignArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BudgetArg {
    /// Enumeration budget in elementary steps.
    #[arg(long, env = "BILRANK_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub name: String,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub ext: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub kind: Option<Kind>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub budget: BudgetArg,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub budget: BudgetArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    /// Comma-separated checker names, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub json: bool,
    /// Report false conclusions as violations even when hypotheses fail.
    #[arg(long)]
    pub explore: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sampled maximality scan when the exhaustive one exceeds the budget.
    #[arg(long, requires = "seed")]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub budget: BudgetArg,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub file: PathBuf,
    pub report: PathBuf,
    #[command(flatten)]
    pub budget: BudgetArg,
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Violation | CliError::Budget) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Construct(a) => construct(a),
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify(a),
        Command::Replay(a) => replay(a),
        Command::Search(a) => search::run(a),
        Command::Campaign(a) => campaign::run(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(format::write_text(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn construct(a: ConstructArgs) -> Result<(), CliError> {
    let req = ConstructionRequest {
        name: a.name,
        q: a.q,
        ext: a.ext,
        n: a.n,
        m: a.m,
        r: a.r,
        k: a.k,
        d: a.d,
        kind: a.kind,
        seed: a.seed,
    };
    let built = constructions::build_verified(&req, a.budget.budget)?;
    for line in &built.log {
        eprintln!("{line}");
    }
    let file = SubspaceFile {
        subspace: built.subspace,
        claims: Some(built.claims),
        provenance: Some(Provenance { source: "construct".into(), request: Some(req), seed: a.seed, log: built.log }),
    };
    emit(a.out.as_deref(), &file.to_toml()?)
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub summary: String,
    pub field: FieldSpec,
    pub q: u32,
    pub n: usize,
    pub dim: usize,
    pub kind: Kind,
    pub spectrum: Vec<usize>,
    pub rank_counts: Vec<RankCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_rank: Option<usize>,
    pub left_radicals: usize,
    pub right_radicals: usize,
    pub common_left_radical_dim: usize,
    pub common_right_radical_dim: usize,
    pub v_set_left_points: usize,
    pub v_set_left_is_subspace: bool,
    pub v_set_right_points: usize,
    pub v_set_right_is_subspace: bool,
    /// `|I(M)^×|`, for symmetric subspaces in odd characteristic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isotropic_vectors: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isotropic_classes: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<ClaimCheck>,
}

pub fn analysis(file: &SubspaceFile, budget: u64) -> Result<Analysis, SpanError> {
    let m = &file.subspace;
    let spectrum = m.rank_spectrum(budget)?;
    let left = m.distinct_radicals(Side::Left, budget)?.len();
    let right = m.distinct_radicals(Side::Right, budget)?.len();
    let vl = m.v_set(Side::Left, budget)?;
    let vr = m.v_set(Side::Right, budget)?;
    let iso = m.isotropic_set(budget).ok();
    let claims = match &file.claims {
        Some(c) => constructions::check_claims(m, c, budget)?,
        None => Vec::new(),
    };
    let summary = if spectrum.is_empty() {
        format!("dim {}, rank(M)=0", m.dim())
    } else {
        format!("dim {}, rank(M) = {spectrum}, {right} radicals", m.dim())
    };
    Ok(Analysis {
        summary,
        field: m.field().spec().clone(),
        q: m.q(),
        n: m.n(),
        dim: m.dim(),
        kind: m.kind(),
        spectrum: spectrum.ranks(),
        rank_counts: spectrum.counts.clone(),
        constant_rank: spectrum.constant_rank(),
        left_radicals: left,
        right_radicals: right,
        common_left_radical_dim: m.common_radical(Side::Left).dim(),
        common_right_radical_dim: m.common_radical(Side::Right).dim(),
        v_set_left_points: vl.points.len(),
        v_set_left_is_subspace: vl.is_subspace,
        v_set_right_points: vr.points.len(),
        v_set_right_is_subspace: vr.is_subspace,
        isotropic_vectors: iso.as_ref().map(|i| i.vectors.len()),
        isotropic_classes: iso.and_then(|i| i.partition.map(|p| p.len())),
        claims,
    })
}

fn analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let file = SubspaceFile::read(&a.file)?;
    let report = analysis(&file, a.budget.budget)?;
    let text = if a.json {
        serde_json::to_string_pretty(&report).map_err(|e| FormatError::Serialize(e.to_string()))? + "\n"
    } else {
        toml::to_string(&report).map_err(|e| FormatError::Serialize(e.to_string()))?
    };
    eprintln!("{}", report.summary);
    emit(a.out.as_deref(), &text)
}

pub fn parse_suite(suite: &str) -> Result<Vec<&'static str>, CliError> {
    if suite.trim() == "all" {
        return Ok(CHECKERS.to_vec());
    }
    suite
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            CHECKERS.iter().copied().find(|c| *c == s).ok_or_else(|| {
                CliError::Usage(format!("unknown checker `{s}`; expected one of {}", CHECKERS.join(", ")))
            })
        })
        .collect()
}

/// Exit status for a set of reports.
pub fn status(reports: &[VerificationReport]) -> Result<(), CliError> {
    if reports.iter().any(|r| r.verdict == Verdict::Violated) {
        Err(CliError::Violation)
    } else if reports.iter().any(|r| r.verdict == Verdict::BudgetExceeded) {
        Err(CliError::Budget)
    } else {
        Ok(())
    }
}

pub fn verify_subspace(file: &SubspaceFile, selection: &[&str], options: &mut SuiteOptions) -> Vec<VerificationReport> {
    options.claims = file.claims.clone();
    run_suite(&file.subspace, selection, options)
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let selection = parse_suite(&a.suite)?;
    let file = SubspaceFile::read(&a.file)?;
    let mut options =
        SuiteOptions { budget: a.budget.budget, explore: a.explore, claims: None, trials: a.trials, seed: a.seed };
    let reports = verify_subspace(&file, &selection, &mut options);
    for r in &reports {
        let tag = if r.explored { " (explored)" } else { "" };
        eprintln!("{:<34} {}{tag}", r.theorem_id, r.verdict);
    }
    let report = ReportFile::new(&file.subspace, a.budget.budget, a.explore, reports);
    let text = if a.json { report.to_json()? } else { report.to_toml()? };
    emit(a.out.as_deref(), &text)?;
    status(&report.reports)
}

fn replay(a: ReplayArgs) -> Result<(), CliError> {
    let file = SubspaceFile::read(&a.file)?;
    let report = ReportFile::parse(&format::read_text(&a.report)?)?;
    let mut all = true;
    for r in &report.reports {
        if let Some(w) = &r.witness {
            let ok = w.replay(&file.subspace, a.budget.budget);
            all &= ok;
            println!("{:<34} {}", r.theorem_id, if ok { "reproduced" } else { "not reproduced" });
        }
    }
    if all {
        Ok(())
    } else {
        Err(CliError::Usage("some witnesses were not reproduced".into()))
    }
}

/// Reads a subspace file, reporting errors as a CLI error.
pub fn load(path: &Path) -> Result<FormSubspace, CliError> {
    Ok(SubspaceFile::read(path)?.subspace)
}
