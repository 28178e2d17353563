use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{status, verify_subspace, BudgetArg, CliError};
use crate::constructions::{self, ConstructionError, ConstructionRequest};
use crate::format::{self, FormatError, Provenance, ReportFile, SubspaceFile};
use crate::spanspace::{Kind, DEFAULT_BUDGET};
use crate::theoremlab::{SuiteOptions, Verdict, CHECKERS};

/// One family of grid points: the cartesian product of every non-empty list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// A catalogue construction name, e.g. `random`.
    pub sampler: String,
    pub q: Vec<u64>,
    pub n: Vec<usize>,
    pub kind: Vec<Kind>,
    pub d: Vec<usize>,
    pub seeds: Vec<u64>,
    pub ext: Vec<u32>,
    pub m: Vec<usize>,
    pub r: Vec<usize>,
    pub k: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Campaign {
    pub out_dir: PathBuf,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub explore: bool,
    #[serde(default)]
    pub suite: Vec<String>,
    pub grid: Vec<GridSpec>,
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    /// TOML campaign file; the grid flags below are ignored when given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value = "random")]
    pub sampler: String,
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub kind: Vec<Kind>,
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Shorthand for `--seeds 0,1,...,N-1`.
    #[arg(long, conflicts_with = "seeds")]
    pub seed_count: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub ext: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub explore: bool,
    #[command(flatten)]
    pub budget: BudgetArg,
}

fn options<T: Copy>(v: &[T]) -> Vec<Option<T>> {
    if v.is_empty() {
        vec![None]
    } else {
        v.iter().copied().map(Some).collect()
    }
}

impl GridSpec {
    /// Requests in a fixed order, without duplicates.
    pub fn requests(&self) -> Vec<ConstructionRequest> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for &q in &self.q {
            for n in options(&self.n) {
                for kind in options(&self.kind) {
                    for d in options(&self.d) {
                        for seed in options(&self.seeds) {
                            for ext in options(&self.ext) {
                                for m in options(&self.m) {
                                    for r in options(&self.r) {
                                        for k in options(&self.k) {
                                            let req = ConstructionRequest {
                                                name: self.sampler.clone(),
                                                q,
                                                ext,
                                                n,
                                                m,
                                                r,
                                                k,
                                                d,
                                                kind,
                                                seed,
                                            };
                                            if seen.insert(point_key(&req)) {
                                                out.push(req);
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Directory name derived from a request's parameters.
pub fn point_key(req: &ConstructionRequest) -> String {
    let mut key = format!("q{}", req.q);
    let mut push = |tag: &str, v: Option<String>| {
        if let Some(v) = v {
            key.push_str(&format!("-{tag}{v}"));
        }
    };
    push("n", req.n.map(|v| v.to_string()));
    push("ext", req.ext.map(|v| v.to_string()));
    push("m", req.m.map(|v| v.to_string()));
    push("r", req.r.map(|v| v.to_string()));
    push("k", req.k.map(|v| v.to_string()));
    push("d", req.d.map(|v| v.to_string()));
    push("", req.kind.map(|v| v.to_string()));
    push("seed", req.seed.map(|v| v.to_string()));
    key
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointSummary {
    pub path: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<usize>>,
    pub holds: usize,
    pub violated: usize,
    pub not_applicable: usize,
    pub budget_exceeded: usize,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub format: String,
    pub points: Vec<PointSummary>,
}

fn run_point(
    out_dir: &Path,
    req: &ConstructionRequest,
    selection: &[&str],
    budget: u64,
    explore: bool,
) -> Result<PointSummary, FormatError> {
    let rel = format!("{}/{}", req.name, point_key(req));
    let dir = out_dir.join(&rel);
    let mut summary = PointSummary {
        path: rel,
        status: "ok".into(),
        dim: None,
        spectrum: None,
        holds: 0,
        violated: 0,
        not_applicable: 0,
        budget_exceeded: 0,
        note: String::new(),
    };
    let built = match constructions::build_verified(req, budget) {
        Ok(b) => b,
        Err(e @ (ConstructionError::BadParams(_) | ConstructionError::MissingParam { .. })) => {
            summary.status = "skipped".into();
            summary.note = e.to_string();
            return Ok(summary);
        }
        Err(e @ ConstructionError::VerificationFailed(_)) => {
            summary.status = "violated".into();
            summary.note = e.to_string();
            return Ok(summary);
        }
        Err(e) => {
            summary.status = "error".into();
            summary.note = e.to_string();
            return Ok(summary);
        }
    };
    let file = SubspaceFile {
        subspace: built.subspace,
        claims: Some(built.claims),
        provenance: Some(Provenance {
            source: "campaign".into(),
            request: Some(req.clone()),
            seed: req.seed,
            log: built.log,
        }),
    };
    file.write(&dir.join("subspace.toml"))?;
    let mut options = SuiteOptions { budget, explore, ..SuiteOptions::default() };
    let reports = verify_subspace(&file, selection, &mut options);
    for r in &reports {
        match r.verdict {
            Verdict::Holds => summary.holds += 1,
            Verdict::Violated => summary.violated += 1,
            Verdict::NotApplicable => summary.not_applicable += 1,
            Verdict::BudgetExceeded => summary.budget_exceeded += 1,
        }
    }
    summary.status = match status(&reports) {
        Ok(()) => "ok",
        Err(CliError::Violation) => "violated",
        Err(_) => "budget-exceeded",
    }
    .into();
    let report = ReportFile::new(&file.subspace, budget, explore, reports);
    summary.dim = Some(report.subject.dim);
    summary.spectrum = report.subject.spectrum.clone();
    format::write_text(&dir.join("report.toml"), &report.to_toml()?)?;
    Ok(summary)
}

/// Runs every grid point concurrently and writes `summary.toml`.
pub fn run_campaign(c: &Campaign) -> Result<CampaignSummary, CliError> {
    let suite: Vec<&str> = if c.suite.is_empty() { CHECKERS.to_vec() } else { super::parse_suite(&c.suite.join(","))? };
    let requests: Vec<ConstructionRequest> = c.grid.iter().flat_map(GridSpec::requests).collect();
    let points = requests
        .par_iter()
        .map(|req| run_point(&c.out_dir, req, &suite, c.budget, c.explore))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = CampaignSummary { format: "bilrank-campaign/1".into(), points };
    let text = toml::to_string(&summary).map_err(|e| FormatError::Serialize(e.to_string()))?;
    format::write_text(&c.out_dir.join("summary.toml"), &text)?;
    Ok(summary)
}

pub fn run(a: CampaignArgs) -> Result<(), CliError> {
    let campaign = match &a.config {
        Some(path) => toml::from_str::<Campaign>(&format::read_text(path)?)
            .map_err(|e| FormatError::Parse(format!("{}: {e}", path.display())))?,
        None => Campaign {
            out_dir: a.out_dir.clone().expect("required without --config"),
            budget: a.budget.budget,
            explore: a.explore,
            suite: if a.suite == "all" { Vec::new() } else { vec![a.suite.clone()] },
            grid: vec![GridSpec {
                sampler: a.sampler.clone(),
                q: a.q.clone(),
                n: a.n.clone(),
                kind: a.kind.clone(),
                d: a.d.clone(),
                seeds: match a.seed_count {
                    Some(count) => (0..count).collect(),
                    None => a.seeds.clone(),
                },
                ext: a.ext.clone(),
                m: a.m.clone(),
                r: a.r.clone(),
                k: a.k.clone(),
            }],
        },
    };
    if campaign.grid.iter().any(|g| g.q.is_empty()) {
        return Err(CliError::Usage("every grid needs at least one q".into()));
    }
    if campaign.grid.iter().any(|g| g.sampler == "random" && g.seeds.is_empty()) {
        return Err(CliError::Usage("random grids need explicit seeds".into()));
    }
    let summary = run_campaign(&campaign)?;
    let count = |s: &str| summary.points.iter().filter(|p| p.status == s).count();
    eprintln!(
        "{} points: {} ok, {} violated, {} budget-exceeded, {} skipped, {} errors",
        summary.points.len(),
        count("ok"),
        count("violated"),
        count("budget-exceeded"),
        count("skipped"),
        count("error")
    );
    if count("violated") > 0 {
        Err(CliError::Violation)
    } else if count("budget-exceeded") + count("error") > 0 {
        Err(CliError::Budget)
    } else {
        Ok(())
    }
}
