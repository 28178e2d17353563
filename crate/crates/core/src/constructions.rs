//! Explicit subspace families: trace forms, block matrices, pencils, the
//! odd-dimensional alternating family, trace compression and column families.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formcore::{GramForm, Side};
use crate::gf::{Elt, Field, GfError, Tower};
use crate::spanspace::{random_subspace, FormSubspace, Kind, SpanError, DEFAULT_BUDGET};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error("unknown construction `{0}`")]
    UnknownName(String),
    #[error("construction `{name}` needs parameter `{param}`")]
    MissingParam { name: String, param: &'static str },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("self-verification failed: {0}")]
    VerificationFailed(String),
}

pub const CATALOGUE: &[&str] = &[
    "alt-full",
    "symm-full",
    "bil-full",
    "trace-symmetric",
    "block-symmetric",
    "alt-pencil",
    "alt-odd",
    "alt-odd-compressed",
    "column-family",
    "random",
];

/// A named construction and its parameters. `ext` is the extension degree
/// (`m` for trace-symmetric, `t` for the compressed families).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionRequest {
    pub name: String,
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ext: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ConstructionRequest {
    pub fn new(name: &str, q: u64) -> ConstructionRequest {
        ConstructionRequest { name: name.to_string(), q, ..Default::default() }
    }

    fn need<T: Copy>(&self, v: Option<T>, param: &'static str) -> Result<T, ConstructionError> {
        v.ok_or_else(|| ConstructionError::MissingParam { name: self.name.clone(), param })
    }
}

/// What a construction asserts about its output.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claims {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<usize>>,
    /// Number of distinct radicals of `M^×`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radicals: Option<usize>,
    /// All of `M^×` shares one radical on this side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared_radical: Option<Side>,
}

#[derive(Clone, Debug)]
pub struct Built {
    pub subspace: FormSubspace,
    pub claims: Claims,
    pub log: Vec<String>,
}

/// Result of checking a subspace against its claims.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub claim: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

pub fn check_claims(m: &FormSubspace, claims: &Claims, budget: u64) -> Result<Vec<ClaimCheck>, SpanError> {
    let mut wanted: Vec<(String, String)> = Vec::new();
    if let Some(d) = claims.dim {
        wanted.push(("dim".into(), d.to_string()));
    }
    if let Some(k) = claims.kind {
        wanted.push(("kind".into(), k.to_string()));
    }
    if let Some(s) = &claims.spectrum {
        wanted.push(("spectrum".into(), format!("{s:?}")));
    }
    if let Some(t) = claims.radicals {
        wanted.push(("radicals".into(), t.to_string()));
    }
    if let Some(side) = claims.shared_radical {
        wanted.push((shared_radical_claim(side).into(), "1".into()));
    }
    let mut out = Vec::new();
    for (claim, expected) in wanted {
        let actual = claim_value(m, &claim, &expected, budget)?.expect("known claim");
        out.push(ClaimCheck { ok: actual == expected, claim, expected, actual });
    }
    Ok(out)
}

fn shared_radical_claim(side: Side) -> &'static str {
    match side {
        Side::Left => "shared-left-radical",
        Side::Right => "shared-right-radical",
    }
}

/// The value of a named claim on `m`, rendered like the claim's expected
/// value; `None` for an unknown claim name.
pub fn claim_value(m: &FormSubspace, claim: &str, expected: &str, budget: u64) -> Result<Option<String>, SpanError> {
    Ok(Some(match claim {
        "dim" => m.dim().to_string(),
        "kind" => match expected.parse::<Kind>() {
            Ok(k) if m.basis().iter().all(|f| k.admits(m.field(), f)) => k.to_string(),
            _ => m.kind().to_string(),
        },
        "spectrum" => format!("{:?}", m.rank_spectrum(budget)?.ranks()),
        "radicals" => m.distinct_radicals(Side::Right, budget)?.len().to_string(),
        "shared-left-radical" => m.distinct_radicals(Side::Left, budget)?.len().to_string(),
        "shared-right-radical" => m.distinct_radicals(Side::Right, budget)?.len().to_string(),
        _ => return Ok(None),
    }))
}

fn field(q: u64) -> Result<Arc<Field>, ConstructionError> {
    Ok(Field::of_order(q)?)
}

/// `N = {f_z : z ∈ L}` with `f_z(x, y) = Tr(z x y)` on `L = GF(q^m)` viewed as `K^m`.
pub fn symmetric_trace(base: Arc<Field>, m: usize) -> Result<FormSubspace, ConstructionError> {
    if m < 2 {
        return Err(ConstructionError::BadParams(format!("extension degree m = {m} must be at least 2")));
    }
    let tower = Tower::new(base.clone(), Field::canonical(base.p(), base.k() * m as u32)?)?;
    let top = tower.top().clone();
    let b = tower.basis().to_vec();
    let forms: Vec<GramForm> = b
        .iter()
        .map(|&z| {
            let mut g = GramForm::zero(m);
            for i in 0..m {
                for j in 0..m {
                    let x = top.mul(z, top.mul(b[i], b[j]));
                    g.set(i, j, tower.trace(x).expect("element of the top field"));
                }
            }
            g
        })
        .collect();
    Ok(FormSubspace::span(base, m, &forms)?.with_kind(Kind::Symmetric)?)
}

/// Extends every form by zero so that `span{e_{d+1}, …, e_n}` lies in every radical.
pub fn embed_with_radical(m: &FormSubspace, n: usize) -> Result<FormSubspace, ConstructionError> {
    let u = m.n();
    if n < u {
        return Err(ConstructionError::BadParams(format!("n = {n} is smaller than the form size {u}")));
    }
    let forms: Vec<GramForm> = m
        .basis()
        .iter()
        .map(|f| {
            let mut g = GramForm::zero(n);
            for i in 0..u {
                for j in 0..u {
                    g.set(i, j, f.get(i, j));
                }
            }
            g
        })
        .collect();
    Ok(FormSubspace::span(m.field().clone(), n, &forms)?.with_kind(m.kind())?)
}

/// Symmetric `[[0, A], [A^T, 0]]` with `A` running over `r × (n − r)` matrices.
pub fn block_symmetric(field: Arc<Field>, n: usize, r: usize) -> Result<FormSubspace, ConstructionError> {
    if r < 1 || 2 * r > n {
        return Err(ConstructionError::BadParams(format!("need 1 <= r <= n/2, got r = {r}, n = {n}")));
    }
    let mut forms = Vec::new();
    for i in 0..r {
        for j in r..n {
            let mut g = GramForm::zero(n);
            g.set(i, j, Elt::ONE);
            g.set(j, i, Elt::ONE);
            forms.push(g);
        }
    }
    Ok(FormSubspace::span(field, n, &forms)?.with_kind(Kind::Symmetric)?)
}

/// `x_1 y_i − x_i y_1` for `i = 2..n`.
pub fn alternating_pencil(field: Arc<Field>, n: usize) -> Result<FormSubspace, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::BadParams(format!("n = {n} must be at least 2")));
    }
    let minus = field.neg(Elt::ONE);
    let forms: Vec<GramForm> = (1..n)
        .map(|i| {
            let mut g = GramForm::zero(n);
            g.set(0, i, Elt::ONE);
            g.set(i, 0, minus);
            g
        })
        .collect();
    Ok(FormSubspace::span(field, n, &forms)?.with_kind(Kind::Alternating)?)
}

/// `f_a(x, y) = Tr(a (x y^q − x^q y))` on `GF(q^k)` viewed as `K^k`, for odd
/// `k > 1`. The result is checked for constant rank `k − 1` and for its
/// radicals being all lines of `K^k`; a failure rejects the construction.
pub fn alternating_odd_full(base: Arc<Field>, k: usize) -> Result<FormSubspace, ConstructionError> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(ConstructionError::BadParams(format!("k = {k} must be odd and greater than 1")));
    }
    let tower = Tower::new(base.clone(), Field::canonical(base.p(), base.k() * k as u32)?)?;
    let top = tower.top().clone();
    let q = base.q() as u64;
    let b = tower.basis().to_vec();
    let frob: Vec<Elt> = b.iter().map(|&x| top.pow(x, q)).collect();
    let forms: Vec<GramForm> = b
        .iter()
        .map(|&a| {
            let mut g = GramForm::zero(k);
            for i in 0..k {
                for j in 0..k {
                    let inner = top.sub(top.mul(b[i], frob[j]), top.mul(frob[i], b[j]));
                    g.set(i, j, tower.trace(top.mul(a, inner)).expect("element of the top field"));
                }
            }
            g
        })
        .collect();
    let m = FormSubspace::span(base.clone(), k, &forms)?
        .with_kind(Kind::Alternating)
        .map_err(|e| ConstructionError::VerificationFailed(e.to_string()))?;
    if m.dim() != k {
        return Err(ConstructionError::VerificationFailed(format!("dimension {} instead of {k}", m.dim())));
    }
    let spectrum = m.rank_spectrum(DEFAULT_BUDGET)?;
    if spectrum.ranks() != vec![k - 1] {
        return Err(ConstructionError::VerificationFailed(format!("spectrum {spectrum} instead of {{{}}}", k - 1)));
    }
    let spread = m.radical_spread(DEFAULT_BUDGET)?;
    let lines = (q.pow(k as u32) - 1) / (q - 1);
    if !(spread.covers && spread.pairwise_trivial && spread.t as u64 == lines) {
        return Err(ConstructionError::VerificationFailed(format!(
            "radicals do not form the spread of all {lines} lines (t = {})",
            spread.t
        )));
    }
    Ok(m)
}

/// `F(e_i b_a, e_j b_c) = Tr(b_a b_c f(e_i, e_j))`: a form over `L` on `L^n`
/// read as a form over `K` on `K^{nt}`, coordinate `i t + a`.
pub fn compress_form(f: &GramForm, tower: &Tower) -> GramForm {
    let top = tower.top();
    let t = tower.degree() as usize;
    let b = tower.basis();
    let n = f.n();
    let mut g = GramForm::zero(n * t);
    for i in 0..n {
        for j in 0..n {
            let v = f.get(i, j);
            if v.is_zero() {
                continue;
            }
            for a in 0..t {
                for c in 0..t {
                    let x = top.mul(top.mul(b[a], b[c]), v);
                    g.set(i * t + a, j * t + c, tower.trace(x).expect("element of the top field"));
                }
            }
        }
    }
    g
}

/// Coordinates over `K` of a vector over `L`, matching [`compress_form`].
pub fn compress_vector(u: &[Elt], tower: &Tower) -> Vec<Elt> {
    u.iter().flat_map(|&x| tower.coordinates(x).to_vec()).collect()
}

/// `{Tr ∘ f : f ∈ M}` as a subspace over the base field, of dimension `t · dim M`.
pub fn trace_compress(m: &FormSubspace, tower: &Tower) -> Result<FormSubspace, ConstructionError> {
    if **m.field() != **tower.top() {
        return Err(ConstructionError::BadParams(format!(
            "subspace is over GF({}), tower top is GF({})",
            m.q(),
            tower.top().q()
        )));
    }
    let top = tower.top();
    let t = tower.degree() as usize;
    let mut forms = Vec::new();
    for f in m.basis() {
        for &beta in tower.basis() {
            forms.push(compress_form(&f.scale(top, beta), tower));
        }
    }
    let out = FormSubspace::span(tower.base().clone(), m.n() * t, &forms)?;
    if out.dim() != t * m.dim() {
        return Err(ConstructionError::VerificationFailed(format!(
            "compressed dimension {} instead of {}",
            out.dim(),
            t * m.dim()
        )));
    }
    let kind = if m.kind() == Kind::General { out.kind() } else { m.kind() };
    Ok(out.with_kind(kind)?)
}

/// `m × m` matrices over `L` whose first `r` columns are arbitrary and the rest zero.
pub fn column_family(top: Arc<Field>, m: usize, r: usize) -> Result<FormSubspace, ConstructionError> {
    if r < 1 || r > m {
        return Err(ConstructionError::BadParams(format!("need 1 <= r <= m, got r = {r}, m = {m}")));
    }
    let mut forms = Vec::new();
    for i in 0..m {
        for j in 0..r {
            let mut g = GramForm::zero(m);
            g.set(i, j, Elt::ONE);
            forms.push(g);
        }
    }
    Ok(FormSubspace::span(top, m, &forms)?.with_kind(Kind::General)?)
}

/// The column family over `GF(q^s)`, compressed to `GF(q)` (no compression when `s = 1`).
pub fn bilinear_column_family(q: u64, s: u32, m: usize, r: usize) -> Result<FormSubspace, ConstructionError> {
    let tower = Tower::of_order(q, s)?;
    let n = column_family(tower.top().clone(), m, r)?;
    if s == 1 {
        return Ok(n);
    }
    trace_compress(&n, &tower)
}

pub fn build(req: &ConstructionRequest) -> Result<Built, ConstructionError> {
    let name = req.name.as_str();
    let mut log = Vec::new();
    let (subspace, claims) = match name {
        "alt-full" | "symm-full" | "bil-full" => {
            let n = req.need(req.n, "n")?;
            let kind = match name {
                "alt-full" => Kind::Alternating,
                "symm-full" => Kind::Symmetric,
                _ => Kind::General,
            };
            let m = FormSubspace::full(field(req.q)?, n, kind);
            let claims = Claims { dim: Some(kind.ambient_dim(n)), kind: Some(kind), ..Default::default() };
            (m, claims)
        }
        "trace-symmetric" => {
            let ext = req.need(req.ext, "ext")? as usize;
            let n = req.n.unwrap_or(ext);
            let base = symmetric_trace(field(req.q)?, ext)?;
            log.push(format!("trace forms on GF({}^{ext}), dim {}", req.q, base.dim()));
            let m = embed_with_radical(&base, n)?;
            let claims = Claims {
                dim: Some(ext),
                kind: Some(Kind::Symmetric),
                spectrum: Some(vec![ext]),
                shared_radical: (n > ext).then_some(Side::Right),
                ..Default::default()
            };
            (m, claims)
        }
        "block-symmetric" => {
            let n = req.need(req.n, "n")?;
            let r = req.need(req.r, "r")?;
            let m = block_symmetric(field(req.q)?, n, r)?;
            let claims = Claims {
                dim: Some(r * (n - r)),
                kind: Some(Kind::Symmetric),
                spectrum: Some((1..=r).map(|s| 2 * s).collect()),
                ..Default::default()
            };
            (m, claims)
        }
        "alt-pencil" => {
            let n = req.need(req.n, "n")?;
            let m = alternating_pencil(field(req.q)?, n)?;
            let claims = Claims {
                dim: Some(n - 1),
                kind: Some(Kind::Alternating),
                spectrum: Some(vec![2]),
                radicals: Some(((req.q.pow(n as u32 - 1) - 1) / (req.q - 1)) as usize),
                ..Default::default()
            };
            (m, claims)
        }
        "alt-odd" => {
            let k = req.need(req.k, "k")?;
            let m = alternating_odd_full(field(req.q)?, k)?;
            log.push(format!("verified constant rank {} and the spread of all lines", k - 1));
            let claims = Claims {
                dim: Some(k),
                kind: Some(Kind::Alternating),
                spectrum: Some(vec![k - 1]),
                radicals: Some(((req.q.pow(k as u32) - 1) / (req.q - 1)) as usize),
                ..Default::default()
            };
            (m, claims)
        }
        "alt-odd-compressed" => {
            let k = req.need(req.k, "k")?;
            let t = req.need(req.ext, "ext")?;
            let tower = Tower::of_order(req.q, t)?;
            let inner = alternating_odd_full(tower.top().clone(), k)?;
            log.push(format!("verified the odd family over GF({})", tower.top().q()));
            let m = trace_compress(&inner, &tower)?;
            let n = k * t as usize;
            let rank = (k - 1) * t as usize;
            let claims = Claims {
                dim: Some(n),
                kind: Some(Kind::Alternating),
                spectrum: Some(vec![rank]),
                radicals: Some(((req.q.pow(n as u32) - 1) / (req.q.pow((n - rank) as u32) - 1)) as usize),
                ..Default::default()
            };
            (m, claims)
        }
        "column-family" => {
            let s = req.ext.unwrap_or(1);
            let m_dim = req.need(req.m, "m")?;
            let r = req.need(req.r, "r")?;
            let m = bilinear_column_family(req.q, s, m_dim, r)?;
            let n = m_dim * s as usize;
            let claims = Claims {
                dim: Some(r * n),
                spectrum: Some((1..=r).map(|t| t * s as usize).collect()),
                shared_radical: (r == 1).then_some(Side::Right),
                ..Default::default()
            };
            (m, claims)
        }
        "random" => {
            let n = req.need(req.n, "n")?;
            let d = req.need(req.d, "d")?;
            let kind = req.kind.unwrap_or(Kind::General);
            let seed = req.need(req.seed, "seed")?;
            let m = random_subspace(field(req.q)?, n, d, kind, seed)?;
            log.push(format!("seed {seed}"));
            (m, Claims { dim: Some(d), kind: Some(kind), ..Default::default() })
        }
        other => return Err(ConstructionError::UnknownName(other.to_string())),
    };
    Ok(Built { subspace, claims, log })
}

/// Builds and checks the claims whenever the subspace fits the budget.
pub fn build_verified(req: &ConstructionRequest, budget: u64) -> Result<Built, ConstructionError> {
    let mut built = build(req)?;
    match check_claims(&built.subspace, &built.claims, budget) {
        Ok(checks) => {
            for c in &checks {
                built.log.push(format!("{}: expected {}, found {}", c.claim, c.expected, c.actual));
            }
            if let Some(bad) = checks.iter().find(|c| !c.ok) {
                return Err(ConstructionError::VerificationFailed(format!(
                    "{} is {}, expected {}",
                    bad.claim, bad.actual, bad.expected
                )));
            }
        }
        Err(SpanError::BudgetExceeded { needed, .. }) => {
            built.log.push(format!("claims not checked: enumeration needs {needed} steps"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(built)
}
