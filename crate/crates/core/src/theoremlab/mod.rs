//! Hypothesis-gated checkers. Each checker evaluates its hypotheses on a
//! concrete subspace, computes whether the conclusion holds, and turns the
//! two into a verdict. A violation always carries a witness that
//! [`Witness::replay`] can re-derive from the subspace alone.

mod checks;
mod witness;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::Claims;
use crate::spanspace::{FormSubspace, RankSpectrum, SpanError, DEFAULT_BUDGET};

pub use checks::{
    check_claims, check_counting_identity, check_dimension_bounds, check_filtration, check_isotropic_partition,
    check_kernel_bounds, check_maximality, check_orthogonality, check_radical_equality, check_spread, check_vset,
    check_witt_census_identity, extract_filtration, find_extension, sample_extension, Filtration, FiltrationLevel,
};
pub use witness::Witness;

/// Checker names accepted by [`run_suite`], in the order reports are emitted.
pub const CHECKERS: &[&str] = &[
    "orthogonality",
    "counting",
    "bounds",
    "spread",
    "radical-equality",
    "isotropic-partition",
    "witt-census",
    "maximality",
    "filtration",
    "kernel-bounds",
    "vset",
    "claims",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
    BudgetExceeded,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not-applicable",
            Verdict::BudgetExceeded => "budget-exceeded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub required: String,
    pub actual: String,
    pub satisfied: bool,
}

impl Hypothesis {
    pub fn new(name: &str, required: impl ToString, actual: impl ToString, satisfied: bool) -> Hypothesis {
        Hypothesis { name: name.to_string(), required: required.to_string(), actual: actual.to_string(), satisfied }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem_id: String,
    pub hypotheses: Vec<Hypothesis>,
    pub verdict: Verdict,
    /// Whether the conclusion holds on this input, when it could be evaluated.
    /// Informational when a hypothesis fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<bool>,
    pub detail: String,
    /// Set when a violation was reported even though a hypothesis fails.
    pub explored: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl VerificationReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.satisfied)
    }
}

/// What a checker found about the conclusion.
#[derive(Clone, Debug)]
pub enum Outcome {
    Holds(String),
    Fails(String, Witness),
    /// The conclusion could not be evaluated, e.g. it is undefined on this input.
    Unknown(String),
    Budget(String),
}

impl Outcome {
    fn from_budget(e: SpanError) -> Outcome {
        Outcome::Budget(e.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub budget: u64,
    /// Report false conclusions as violations even when hypotheses fail.
    pub explore: bool,
    pub claims: Option<Claims>,
    /// Sampled maximality scan: number of random candidate forms and seed.
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

impl Default for SuiteOptions {
    fn default() -> SuiteOptions {
        SuiteOptions { budget: DEFAULT_BUDGET, explore: false, claims: None, trials: None, seed: None }
    }
}

/// Inputs shared by every checker of one run.
pub struct Context<'a> {
    pub m: &'a FormSubspace,
    pub options: &'a SuiteOptions,
    pub spectrum: Result<RankSpectrum, SpanError>,
}

impl<'a> Context<'a> {
    pub fn new(m: &'a FormSubspace, options: &'a SuiteOptions) -> Context<'a> {
        Context { m, options, spectrum: m.rank_spectrum(options.budget) }
    }

    pub fn budget(&self) -> u64 {
        self.options.budget
    }

    fn report(&self, id: &str, hypotheses: Vec<Hypothesis>, outcome: impl FnOnce() -> Outcome) -> VerificationReport {
        decide(id, hypotheses, outcome(), self.options.explore)
    }
}

/// Combines hypotheses and outcome into a report.
pub fn decide(id: &str, hypotheses: Vec<Hypothesis>, outcome: Outcome, explore: bool) -> VerificationReport {
    let gated = hypotheses.iter().all(|h| h.satisfied);
    let (verdict, conclusion, detail, witness, explored) = match outcome {
        Outcome::Holds(d) => (if gated { Verdict::Holds } else { Verdict::NotApplicable }, Some(true), d, None, false),
        Outcome::Fails(d, w) => {
            if gated {
                (Verdict::Violated, Some(false), d, Some(w), false)
            } else if explore {
                (Verdict::Violated, Some(false), d, Some(w), true)
            } else {
                (Verdict::NotApplicable, Some(false), d, Some(w), false)
            }
        }
        Outcome::Unknown(d) => (Verdict::NotApplicable, None, d, None, false),
        Outcome::Budget(d) => {
            (if gated { Verdict::BudgetExceeded } else { Verdict::NotApplicable }, None, d, None, false)
        }
    };
    VerificationReport { theorem_id: id.to_string(), hypotheses, verdict, conclusion, detail, explored, witness }
}

fn run_one(ctx: &Context<'_>, name: &str) -> Vec<VerificationReport> {
    match name {
        "orthogonality" => vec![check_orthogonality(ctx)],
        "counting" => vec![check_counting_identity(ctx)],
        "bounds" => check_dimension_bounds(ctx),
        "spread" => vec![check_spread(ctx)],
        "radical-equality" => vec![check_radical_equality(ctx)],
        "isotropic-partition" => vec![check_isotropic_partition(ctx)],
        "witt-census" => vec![check_witt_census_identity(ctx)],
        "maximality" => vec![check_maximality(ctx)],
        "filtration" => vec![check_filtration(ctx)],
        "kernel-bounds" => check_kernel_bounds(ctx),
        "vset" => check_vset(ctx),
        "claims" => ctx.options.claims.as_ref().map(|c| vec![check_claims(ctx, c)]).unwrap_or_default(),
        _ => Vec::new(),
    }
}

/// Runs the selected checkers concurrently; reports come back in selection
/// order. Unknown names are ignored, so validate them beforehand.
pub fn run_suite(m: &FormSubspace, selection: &[&str], options: &SuiteOptions) -> Vec<VerificationReport> {
    if selection.is_empty() {
        return Vec::new();
    }
    let ctx = Context::new(m, options);
    selection.par_iter().map(|name| run_one(&ctx, name)).collect::<Vec<_>>().into_iter().flatten().collect()
}
