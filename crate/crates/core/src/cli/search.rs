use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{emit, BudgetArg, CliError};
use crate::constructions::{check_claims, Claims};
use crate::format::{FormatError, Provenance, SubspaceFile};
use crate::formcore::Side;
use crate::gf::Field;
use crate::spanspace::{random_subspace, FormSubspace, Kind, SpanError};
use crate::theoremlab::{find_extension, sample_extension};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Constant rank `m` symmetric subspaces of dimension `n-1` whose
    /// independent elements all have different radicals.
    SymmetricDistinctRadicals,
    /// Maximal constant rank subspaces, by greedy extension, or an extension
    /// scan of `--input`.
    Maximal,
    /// Alternating subspaces on `K^(2k+1)` of dimension `(k-s+1)n` with
    /// spectrum `{2s, 2s+2, ..., 2k}`.
    AlternatingSpectrum,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: Option<usize>,
    /// Target rank (default 2).
    #[arg(long)]
    pub m: Option<usize>,
    /// Lowest rank parameter for `alternating-spectrum`.
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub kind: Option<Kind>,
    /// Fixture to scan for extensions in `maximal` mode.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Where to write a found fixture.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the search log; stdout when absent.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    pub budget: BudgetArg,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub outcome: String,
    pub accepted: bool,
}

#[derive(Debug, Serialize)]
pub struct SearchLog {
    pub format: String,
    pub mode: Mode,
    pub q: u64,
    pub seed: u64,
    pub trials: u64,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    pub log: Vec<TrialRecord>,
}

struct Found {
    subspace: FormSubspace,
    claims: Claims,
    seed: u64,
}

/// Per-trial seeds, kept below 2^63 so they stay valid TOML integers.
fn trial_seeds(seed: u64, trials: u64) -> impl Iterator<Item = (u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(move |i| (i, rng.gen::<u64>() >> 1))
}

fn need(v: Option<usize>, name: &str) -> Result<usize, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("this search mode needs --{name}")))
}

fn projective_points(q: u32, d: usize) -> usize {
    ((q as u64).pow(d as u32) - 1) as usize / (q as usize - 1)
}

fn distinct_radicals(a: &SearchArgs, log: &mut Vec<TrialRecord>) -> Result<Option<Found>, CliError> {
    let field = Field::of_order(a.q)?;
    let n = need(a.n, "n")?;
    let m = a.m.unwrap_or(2);
    if n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    let d = n - 1;
    let budget = a.budget.budget;
    for (trial, seed) in trial_seeds(a.seed, a.trials) {
        let candidate = random_subspace(field.clone(), n, d, Kind::Symmetric, seed)?;
        let spectrum = candidate.rank_spectrum(budget)?;
        let radicals = candidate.distinct_radicals(Side::Left, budget)?.len();
        let points = projective_points(field.q(), d);
        let accepted = spectrum.constant_rank() == Some(m) && radicals == points;
        log.push(TrialRecord {
            trial,
            seed,
            outcome: format!("spectrum {spectrum}, {radicals} radicals for {points} points"),
            accepted,
        });
        if accepted {
            let claims = Claims {
                dim: Some(d),
                kind: Some(Kind::Symmetric),
                spectrum: Some(vec![m]),
                radicals: Some(points),
                shared_radical: None,
            };
            return Ok(Some(Found { subspace: candidate, claims, seed }));
        }
    }
    Ok(None)
}

fn alternating_spectrum(a: &SearchArgs, log: &mut Vec<TrialRecord>) -> Result<Option<Found>, CliError> {
    let field = Field::of_order(a.q)?;
    let n = need(a.n, "n")?;
    let s = need(a.s, "s")?;
    if n % 2 == 0 || s == 0 || s > n / 2 {
        return Err(CliError::Usage("alternating-spectrum needs odd n = 2k+1 and 1 <= s <= k".into()));
    }
    let k = n / 2;
    let d = (k - s + 1) * n;
    let target: Vec<usize> = (s..=k).map(|i| 2 * i).collect();
    let budget = a.budget.budget;
    for (trial, seed) in trial_seeds(a.seed, a.trials) {
        let candidate = random_subspace(field.clone(), n, d, Kind::Alternating, seed)?;
        let spectrum = candidate.rank_spectrum(budget)?;
        let accepted = spectrum.ranks() == target;
        log.push(TrialRecord { trial, seed, outcome: format!("spectrum {spectrum}"), accepted });
        if accepted {
            let claims =
                Claims { dim: Some(d), kind: Some(Kind::Alternating), spectrum: Some(target), ..Claims::default() };
            return Ok(Some(Found { subspace: candidate, claims, seed }));
        }
    }
    Ok(None)
}

/// Grows `span{f}` one exhaustive extension at a time.
fn grow(start: FormSubspace, rank: usize, budget: u64) -> Result<FormSubspace, SpanError> {
    let mut m = start;
    while let Some(g) = find_extension(&m, rank, budget)? {
        m = m.extended(&g);
    }
    Ok(m)
}

fn maximal(a: &SearchArgs, log: &mut Vec<TrialRecord>) -> Result<Option<Found>, CliError> {
    let budget = a.budget.budget;
    if let Some(path) = &a.input {
        let m = SubspaceFile::read(path)?.subspace;
        let spectrum = m.rank_spectrum(budget)?;
        let Some(rank) = spectrum.constant_rank() else {
            return Err(CliError::Usage(format!("{} is not constant rank (spectrum {spectrum})", path.display())));
        };
        let (how, found) = match find_extension(&m, rank, budget) {
            Ok(g) => ("exhaustive", g),
            Err(SpanError::BudgetExceeded { .. }) => ("sampled", sample_extension(&m, rank, a.trials, a.seed, budget)?),
            Err(e) => return Err(e.into()),
        };
        let ambient = m.kind().ambient_dim(m.n());
        let outcome = match &found {
            None => format!("{how} scan of {} {} forms: maximal", (m.q() as u128).pow(ambient as u32), m.kind()),
            Some(g) => format!("{how} scan: extends by {:?}", g.rows()),
        };
        log.push(TrialRecord { trial: 0, seed: a.seed, outcome, accepted: found.is_none() });
        return Ok(found.map(|g| {
            let ext = m.extended(&g);
            let claims = Claims { dim: Some(ext.dim()), spectrum: Some(vec![rank]), ..Claims::default() };
            Found { subspace: ext, claims, seed: a.seed }
        }));
    }
    let field = Field::of_order(a.q)?;
    let n = need(a.n, "n")?;
    let rank = a.m.unwrap_or(2);
    let kind = a.kind.unwrap_or(Kind::Symmetric);
    let ambient = FormSubspace::full(field.clone(), n, kind);
    let mut best: Option<Found> = None;
    for (trial, seed) in trial_seeds(a.seed, a.trials) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = (0..10_000).map(|_| ambient.random_element(&mut rng)).find(|f| f.rank(&field) == rank);
        let Some(f) = start else {
            log.push(TrialRecord { trial, seed, outcome: format!("no rank {rank} element drawn"), accepted: false });
            continue;
        };
        let grown = grow(FormSubspace::span(field.clone(), n, &[f])?.with_kind(kind)?, rank, budget)?;
        let better = best.as_ref().is_none_or(|b| grown.dim() > b.subspace.dim());
        log.push(TrialRecord {
            trial,
            seed,
            outcome: format!("maximal constant rank {rank} subspace of dim {}", grown.dim()),
            accepted: better,
        });
        if better {
            let claims = Claims { dim: Some(grown.dim()), spectrum: Some(vec![rank]), ..Claims::default() };
            best = Some(Found { subspace: grown, claims, seed });
        }
    }
    Ok(best)
}

pub fn run(a: SearchArgs) -> Result<(), CliError> {
    let mut log = Vec::new();
    let found = match a.mode {
        Mode::SymmetricDistinctRadicals => distinct_radicals(&a, &mut log)?,
        Mode::Maximal => maximal(&a, &mut log)?,
        Mode::AlternatingSpectrum => alternating_spectrum(&a, &mut log)?,
    };
    let mut fixture = None;
    let summary = match &found {
        None if a.mode == Mode::Maximal && a.input.is_some() => "input is maximal".to_string(),
        None => format!("nothing found in {} trials", log.len()),
        Some(f) => {
            let checks = check_claims(&f.subspace, &f.claims, a.budget.budget)?;
            if let Some(bad) = checks.iter().find(|c| !c.ok) {
                return Err(CliError::Usage(format!(
                    "found object failed self-verification: {} is {}, expected {}",
                    bad.claim, bad.actual, bad.expected
                )));
            }
            if let Some(path) = &a.out {
                let file = SubspaceFile {
                    subspace: f.subspace.clone(),
                    claims: Some(f.claims.clone()),
                    provenance: Some(Provenance {
                        source: format!("search {}", a.mode.to_possible_value().expect("named").get_name()),
                        request: None,
                        seed: Some(f.seed),
                        log: checks.iter().map(|c| format!("{}: {}", c.claim, c.actual)).collect(),
                    }),
                };
                file.write(path)?;
                fixture = Some(path.display().to_string());
            }
            format!("found dim {} with {} verified claims (trial seed {})", f.subspace.dim(), checks.len(), f.seed)
        }
    };
    eprintln!("{summary}");
    let out = SearchLog {
        format: "bilrank-search/1".into(),
        mode: a.mode,
        q: a.q,
        seed: a.seed,
        trials: a.trials,
        summary,
        fixture,
        log,
    };
    let text = toml::to_string(&out).map_err(|e| FormatError::Serialize(e.to_string()))?;
    emit(a.log.as_deref(), &text)
}
