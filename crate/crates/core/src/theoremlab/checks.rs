use std::collections::{BTreeMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{decide, Context, Hypothesis, Outcome, VerificationReport, Witness};
use crate::constructions::{self, Claims};
use crate::formcore::{linalg, witt_census, GramForm, Side, Subspace};
use crate::gf::Elt;
use crate::spanspace::{check_budget, FormSubspace, Kind, RankSpectrum, SpanError};

fn budget_report(id: &str, e: &SpanError) -> VerificationReport {
    decide(id, Vec::new(), Outcome::Budget(e.to_string()), false)
}

fn spectrum_of<'c>(ctx: &'c Context<'_>, id: &str) -> Result<&'c RankSpectrum, VerificationReport> {
    ctx.spectrum.as_ref().map_err(|e| budget_report(id, e))
}

fn h_q(q: u32, need: usize) -> Hypothesis {
    Hypothesis::new("q >= m+1", format!(">= {need}"), q, q as usize >= need)
}

fn h_constant(s: &RankSpectrum) -> Hypothesis {
    Hypothesis::new("constant rank", "one nonzero rank", s, s.constant_rank().is_some())
}

fn h_nonzero(m: &FormSubspace) -> Hypothesis {
    Hypothesis::new("nonzero", "dim >= 1", m.dim(), m.dim() > 0)
}

fn h_dim_n(m: &FormSubspace) -> Hypothesis {
    Hypothesis::new("dim M = n", m.n(), m.dim(), m.dim() == m.n())
}

fn h_odd(m: &FormSubspace) -> Hypothesis {
    Hypothesis::new("odd characteristic", "p != 2", m.field().p(), m.field().p() != 2)
}

fn all_symmetric(m: &FormSubspace) -> bool {
    m.basis().iter().all(GramForm::is_symmetric)
}

fn all_alternating(m: &FormSubspace) -> bool {
    m.basis().iter().all(|f| f.is_alternating(m.field()))
}

fn h_kind(m: &FormSubspace, kind: Kind) -> Hypothesis {
    let ok = match kind {
        Kind::Symmetric => all_symmetric(m),
        Kind::Alternating => all_alternating(m),
        Kind::General => true,
    };
    let actual = if all_alternating(m) {
        "alternating"
    } else if all_symmetric(m) {
        "symmetric"
    } else {
        "general"
    };
    Hypothesis::new(&format!("{kind} forms"), kind, actual, ok)
}

fn pow(q: u32, e: usize) -> u128 {
    (q as u128).pow(e as u32)
}

// ---------------------------------------------------------------- orthogonality

pub fn check_orthogonality(ctx: &Context<'_>) -> VerificationReport {
    let id = "orthogonality";
    let s = match spectrum_of(ctx, id) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let m = ctx.m;
    let top = s.max();
    let hyps = vec![h_nonzero(m), h_q(m.q(), top + 1)];
    ctx.report(id, hyps, || {
        if m.is_zero() {
            return Outcome::Holds("zero subspace".into());
        }
        let field = &**m.field();
        let n = m.n();
        let found = m.find_nonzero(ctx.budget(), true, |coeffs, entries| {
            let f = GramForm::from_flat(n, entries.to_vec());
            if f.rank(field) != top {
                return None;
            }
            let (left, right) = (f.left_radical(field), f.right_radical(field));
            for u in left.basis() {
                for w in right.basis() {
                    for (gi, g) in m.basis().iter().enumerate() {
                        let value = g.eval_unchecked(field, u, w);
                        if !value.is_zero() {
                            return Some(Witness::NonOrthogonal {
                                f: coeffs.to_vec(),
                                g: gi,
                                u: u.clone(),
                                w: w.clone(),
                                value,
                            });
                        }
                    }
                }
            }
            None
        });
        match found {
            Err(e) => Outcome::from_budget(e),
            Ok(None) => Outcome::Holds(format!("{} elements of rank {top} checked", s.count(top))),
            Ok(Some(w)) => Outcome::Fails("a basis form does not vanish on rad_L f x rad_R f".into(), w),
        }
    })
}

// ---------------------------------------------------------------- identities

fn counting_sides(m: &FormSubspace, budget: u64) -> Result<(u128, u128), SpanError> {
    let top = m.rank_spectrum(budget)?.max();
    check_budget(m.q(), m.n(), budget)?;
    let q = m.q();
    let lhs = (pow(q, m.dim()) - 1) * (pow(q, m.n() - top) - 1);
    let rhs = (1..pow(q, m.n()) as u64)
        .into_par_iter()
        .map(|idx| {
            let u = linalg::index_to_vector(q as u64, m.n(), idx);
            pow(q, m.kernel_dim(&u, Side::Left)) - 1
        })
        .sum();
    Ok((lhs, rhs))
}

fn spread_size_sides(m: &FormSubspace, budget: u64) -> Result<(u128, u128), SpanError> {
    let top = m.rank_spectrum(budget)?.max();
    let t = m.distinct_radicals(Side::Right, budget)?.len() as u128;
    Ok((t * (pow(m.q(), m.n() - top) - 1), pow(m.q(), m.n()) - 1))
}

/// Dimension of `{f ∈ M : R ⊆ rad_R f}`.
fn induced_dim(m: &FormSubspace, r: &Subspace) -> usize {
    let mut rows: Vec<Vec<Elt>> = Vec::new();
    for v in r.basis() {
        let functionals: Vec<Vec<Elt>> = m.basis().iter().map(|b| b.functional(m.field(), v, Side::Right)).collect();
        rows.extend(linalg::transpose(&functionals, m.n()));
    }
    m.dim() - linalg::rank(m.field(), &rows, m.dim())
}

fn induced_spread_sides(m: &FormSubspace, budget: u64) -> Result<(u128, u128), SpanError> {
    let radicals = m.distinct_radicals(Side::Right, budget)?;
    let lhs = radicals.iter().map(|r| pow(m.q(), induced_dim(m, r)) - 1).sum();
    Ok((lhs, pow(m.q(), m.dim()) - 1))
}

fn isotropic_square_sides(m: &FormSubspace, budget: u64) -> Result<(u128, u128), SpanError> {
    let top = m.rank_spectrum(budget)?.max();
    check_budget(m.q(), m.n(), budget)?;
    let classes = m.isotropic_classes(&m.isotropic_vectors());
    let lhs = classes.iter().map(|c| (pow(m.q(), c.dim) - 1).pow(2)).sum();
    Ok((lhs, (pow(m.q(), m.n()) - 1) * (pow(m.q(), m.n() - top) - 1)))
}

/// Counts of maximum-rank elements with Witt index `k` and `k − 1`, and `|I(M)|`.
fn witt_counts(m: &FormSubspace, budget: u64) -> Result<(u64, u64, u64), SpanError> {
    let top = m.rank_spectrum(budget)?.max();
    check_budget(m.q(), m.n(), budget)?;
    let k = top / 2;
    let n = m.n();
    let field = &**m.field();
    let (a, b) = m.fold_nonzero(
        budget,
        false,
        || (0u64, 0u64),
        |acc, _, entries| {
            let f = GramForm::from_flat(n, entries.to_vec());
            if let Ok(c) = witt_census(field, &f) {
                if c.rank == top && c.witt_index == k {
                    acc.0 += 1;
                } else if c.rank == top && k > 0 && c.witt_index == k - 1 {
                    acc.1 += 1;
                }
            }
        },
        |x, y| (x.0 + y.0, x.1 + y.1),
    )?;
    Ok((a, b, m.isotropic_vectors().len() as u64 + 1))
}

fn witt_sides(m: &FormSubspace, budget: u64) -> Result<(i128, i128), SpanError> {
    let top = m.rank_spectrum(budget)?.max();
    let (a, b, iso) = witt_counts(m, budget)?;
    let (q, n, d, k) = (m.q() as i128, m.n() as u32, m.dim() as u32, (top / 2) as u32);
    Ok((iso as i128 * q.pow(d + k), q.pow(n + k) + (a as i128 - b as i128) * q.pow(n)))
}

fn witt_total_sides(m: &FormSubspace, budget: u64) -> Result<(u128, u128), SpanError> {
    let (a, b, _) = witt_counts(m, budget)?;
    Ok(((a + b) as u128, pow(m.q(), m.dim()) - 1))
}

/// Both sides of a named identity, as compared by the checkers.
pub(crate) fn identity_sides(identity: &str, m: &FormSubspace, budget: u64) -> Option<(String, String)> {
    let pair = |r: Result<(u128, u128), SpanError>| r.ok().map(|(a, b)| (a.to_string(), b.to_string()));
    match identity {
        "counting" => pair(counting_sides(m, budget)),
        "spread-size" => pair(spread_size_sides(m, budget)),
        "induced-spread" => pair(induced_spread_sides(m, budget)),
        "isotropic-squares" => pair(isotropic_square_sides(m, budget)),
        "witt-total" => pair(witt_total_sides(m, budget)),
        "witt-census" => witt_sides(m, budget).ok().map(|(a, b)| (a.to_string(), b.to_string())),
        _ => None,
    }
}

fn identity_outcome(identity: &str, m: &FormSubspace, budget: u64, holds: String) -> Option<Outcome> {
    match identity_sides(identity, m, budget) {
        None => Some(Outcome::Budget(format!("{identity}: enumeration exceeds the budget of {budget}"))),
        Some((lhs, rhs)) if lhs != rhs => Some(Outcome::Fails(
            format!("{identity}: {lhs} != {rhs}"),
            Witness::CountMismatch { identity: identity.to_string(), lhs, rhs },
        )),
        Some(_) if holds.is_empty() => None,
        Some(_) => Some(Outcome::Holds(holds)),
    }
}

pub fn check_counting_identity(ctx: &Context<'_>) -> VerificationReport {
    let id = "counting";
    let s = match spectrum_of(ctx, id) {
        Ok(s) => s,
        Err(r) => return r,
    };
    ctx.report(id, vec![h_constant(s)], || match counting_sides(ctx.m, ctx.budget()) {
        Err(e) => Outcome::from_budget(e),
        Ok((l, r)) if l == r => Outcome::Holds(format!("(q^d-1)(q^(n-m)-1) = {l} = sum over u of (q^d(u)-1)")),
        Ok((l, r)) => Outcome::Fails(
            format!("(q^d-1)(q^(n-m)-1) = {l} but the sum is {r}"),
            Witness::CountMismatch { identity: "counting".into(), lhs: l.to_string(), rhs: r.to_string() },
        ),
    })
}

// ---------------------------------------------------------------- bounds

/// One dimension bound `scale · dim ≤ limit` (or `<` when strict).
#[derive(Clone, Debug)]
pub(crate) struct BoundSpec {
    pub id: String,
    pub hypotheses: Vec<Hypothesis>,
    pub expr: String,
    pub scale: i64,
    pub limit: i64,
    pub strict: bool,
}

impl BoundSpec {
    pub fn holds(&self, dim: usize) -> bool {
        let lhs = self.scale * dim as i64;
        if self.strict {
            lhs < self.limit
        } else {
            lhs <= self.limit
        }
    }
}

pub(crate) fn bound_specs(m: &FormSubspace, s: &RankSpectrum, _budget: u64) -> Vec<BoundSpec> {
    let n = m.n() as i64;
    let top = s.max() as i64;
    let r = s.len() as i64;
    let q = m.q();
    let topu = s.max();
    let sym = || h_kind(m, Kind::Symmetric);
    let alt = || h_kind(m, Kind::Alternating);
    let char_ok = || Hypothesis::new("characteristic != 2", "p != 2", m.field().p(), m.field().p() != 2);
    let new = |id: &str, hypotheses: Vec<Hypothesis>, expr: String, scale: i64, limit: i64, strict: bool| BoundSpec {
        id: id.to_string(),
        hypotheses,
        expr,
        scale,
        limit,
        strict,
    };
    let shared = m.dim() > 0 && m.common_radical(Side::Left).dim() + topu == m.n();
    vec![
        new(
            "bound-constant-rank",
            vec![
                h_constant(s),
                Hypothesis::new(
                    "q >= m+1 or m = n",
                    format!(">= {} or m = {n}", top + 1),
                    format!("q = {q}, m = {top}"),
                    q as i64 > top || top == n,
                ),
            ],
            format!("dim <= n = {n}"),
            1,
            n,
            false,
        ),
        new(
            "bound-symmetric-constant-rank",
            vec![sym(), h_constant(s), char_ok(), h_q(q, topu + 1)],
            format!("dim <= n = {n}"),
            1,
            n,
            false,
        ),
        new(
            "bound-symmetric-ranks",
            vec![sym(), h_nonzero(m), char_ok(), Hypothesis::new("q >= n", format!(">= {n}"), q, q as i64 >= n)],
            format!("dim <= rn - r(r-1)/2 = {}", r * n - r * (r - 1) / 2),
            1,
            r * n - r * (r - 1) / 2,
            false,
        ),
        new(
            "bound-alternating-constant-rank",
            vec![alt(), h_nonzero(m), h_constant(s), h_q(q, topu + 1)],
            format!("dim <= max(n-1, 2m-1) = {}", (n - 1).max(2 * top - 1)),
            1,
            (n - 1).max(2 * top - 1),
            false,
        ),
        new(
            "bound-alternating-ranks",
            vec![
                alt(),
                h_nonzero(m),
                Hypothesis::new("m <= floor(n/2)", format!("<= {}", n / 2), top, top <= n / 2),
                h_q(q, topu + 1),
            ],
            format!("dim <= rn - r(r+1)/2 = {}", r * n - r * (r + 1) / 2),
            1,
            r * n - r * (r + 1) / 2,
            false,
        ),
        new(
            "bound-symmetric-main",
            vec![
                sym(),
                h_constant(s),
                h_odd(m),
                h_q(q, topu + 1),
                Hypothesis::new("m <= 2n/3", format!("<= {}", 2 * n / 3), top, 3 * top <= 2 * n),
            ],
            format!("dim < n = {n}"),
            1,
            n,
            true,
        ),
        new(
            "bound-alternating-n-minus-2",
            vec![
                alt(),
                h_constant(s),
                Hypothesis::new("4 <= m <= floor(n/2)", format!("4..={}", n / 2), top, 4 <= top && top <= n / 2),
                h_q(q, topu + 1),
            ],
            format!("dim <= n-2 = {}", n - 2),
            1,
            n - 2,
            false,
        ),
        new(
            "bound-bilinear-constant-rank",
            vec![h_nonzero(m), h_constant(s), h_q(q, topu + 1)],
            format!("dim <= max(n, 2m-1) = {}", n.max(2 * top - 1)),
            1,
            n.max(2 * top - 1),
            false,
        ),
        new(
            "bound-bilinear-ranks",
            vec![
                h_nonzero(m),
                Hypothesis::new("m <= ceil(n/2)", format!("<= {}", (n + 1) / 2), top, top <= (n + 1) / 2),
                h_q(q, topu + 1),
            ],
            format!("dim <= rn = {}", r * n),
            1,
            r * n,
            false,
        ),
        new(
            "bound-two-ranks",
            vec![
                Hypothesis::new("n even", "even", n, n % 2 == 0),
                Hypothesis::new(
                    "spectrum = {n/2, n}",
                    format!("{{{},{n}}}", n / 2),
                    s,
                    n % 2 == 0 && s.ranks() == vec![(n / 2) as usize, n as usize],
                ),
                Hypothesis::new("q >= n/2+1", format!(">= {}", n / 2 + 1), q, q as i64 > n / 2),
            ],
            format!("dim <= 2n = {}", 2 * n),
            1,
            2 * n,
            false,
        ),
        new(
            "bound-common-radical",
            vec![
                alt(),
                h_constant(s),
                Hypothesis::new(
                    "V(M) = rad f",
                    "one shared radical",
                    if shared { "shared" } else { "not shared" },
                    shared,
                ),
            ],
            format!("dim <= m/2 = {}", top as f64 / 2.0),
            2,
            top,
            false,
        ),
    ]
}

pub fn check_dimension_bounds(ctx: &Context<'_>) -> Vec<VerificationReport> {
    let s = match spectrum_of(ctx, "bounds") {
        Ok(s) => s,
        Err(r) => return vec![r],
    };
    let m = ctx.m;
    bound_specs(m, s, ctx.budget())
        .into_iter()
        .map(|b| {
            let dim = m.dim();
            let outcome = if b.holds(dim) {
                Outcome::Holds(format!("dim {dim}, {}", b.expr))
            } else {
                Outcome::Fails(
                    format!("dim {dim} violates {}", b.expr),
                    Witness::DimensionBound { bound: b.id.clone(), dim, limit: b.expr.clone() },
                )
            };
            ctx.report(&b.id, b.hypotheses, || outcome)
        })
        .collect()
}

// ---------------------------------------------------------------- spread

fn spread_outcome(m: &FormSubspace, budget: u64) -> Outcome {
    if m.is_zero() {
        return Outcome::Unknown("zero subspace has no radicals".into());
    }
    let field = &**m.field();
    let reps = match m.radical_representatives(Side::Right, budget) {
        Ok(r) => r,
        Err(e) => return Outcome::from_budget(e),
    };
    if let Err(e) = check_budget(m.q(), m.n(), budget) {
        return Outcome::from_budget(e);
    }
    let radicals: Vec<Subspace> = reps.keys().cloned().collect();
    let report = m.spread_of(radicals.clone());
    if !report.pairwise_trivial {
        for (i, (ra, a)) in reps.iter().enumerate() {
            for (rb, b) in reps.iter().skip(i + 1) {
                let meet = ra.intersection(field, rb);
                if let Some(v) = meet.basis().first() {
                    return Outcome::Fails(
                        "two distinct radicals meet nontrivially".into(),
                        Witness::RadicalsMeet { a: a.clone(), b: b.clone(), v: v.clone() },
                    );
                }
            }
        }
    }
    if !report.covers {
        let v = linalg::vectors(field, m.n()).skip(1).find(|v| m.kernel_dim(v, Side::Right) == 0);
        if let Some(v) = v {
            return Outcome::Fails("a nonzero vector lies in no radical".into(), Witness::Uncovered { v });
        }
    }
    for identity in ["spread-size", "induced-spread"] {
        if let Some(o) = identity_outcome(identity, m, budget, String::new()) {
            return o;
        }
    }
    Outcome::Holds(format!("t = {} radicals form a spread of V; the induced subspaces form a spread of M", report.t))
}

pub fn check_spread(ctx: &Context<'_>) -> VerificationReport {
    let id = "spread";
    let s = match spectrum_of(ctx, id) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let m = ctx.m;
    let hyps = vec![h_kind(m, Kind::Alternating), h_constant(s), h_dim_n(m), h_q(m.q(), s.max() + 1)];
    ctx.report(id, hyps, || spread_outcome(m, ctx.budget()))
}

// ---------------------------------------------------------------- radical equality

pub fn check_radical_equality(ctx: &Context<'_>) -> VerificationReport {
    let id = "radical-equality";
    let s = match spectrum_of(ctx, id) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let m = ctx.m;
    let top = s.max();
    let hyps = vec![
        h_dim_n(m),
        h_constant(s),
        h_q(m.q(), top + 1),
        Hypothesis::new("n >= 2m+1", format!(">= {}", 2 * top + 1), m.n(), m.n() > 2 * top),
    ];
    ctx.report(id, hyps, || {
        let (left, right) = match (
            m.radical_representatives(Side::Left, ctx.budget()),
            m.radical_representatives(Side::Right, ctx.budget()),
        ) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => return Outcome::from_budget(e),
        };
        if left.len() <= 1 || right.len() <= 1 {
            let side = if left.len() <= 1 { "left" } else { "right" };
            return Outcome::Holds(format!("all of M^x shares one {side} radical"));
        }
        let pick = |map: &BTreeMap<Subspace, Vec<Elt>>| {
            let mut it = map.values();
            [it.next().unwrap().clone(), it.next().unwrap().clone()]
        };
        Outcome::Fails(
            format!("{} distinct left and {} distinct right radicals", left.len(), right.len()),
            Witness::RadicalsDiffer { left: pick(&left), right: pick(&right) },
        )
    })
}

// ---------------------------------------------------------------- isotropic partition

fn partition_outcome(m: &FormSubspace, budget: u64) -> Outcome {
    if m.field().p() == 2 || !all_symmetric(m) {
        return Outcome::Unknown("A_u classes need symmetric forms in odd characteristic".into());
    }
    if let Err(e) = check_budget(m.q(), m.n(), budget) {
        return Outcome::from_budget(e);
    }
    let field = &**m.field();
    if m.dim() == m.n() {
        for u in linalg::vectors(field, m.n()).skip(1) {
            let a = m.annihilator(&u).expect("length").dim();
            let k = m.kernel_dim(&u, Side::Left);
            if a != k {
                return Outcome::Fails(
                    format!("dim A_u = {a} but dim M_u = {k}"),
                    Witness::ClassDimension { u, annihilator: a, kernel: k },
                );
            }
        }
    }
    let vectors = m.isotropic_vectors();
    let iso: HashSet<&Vec<Elt>> = vectors.iter().collect();
    let classes = m.isotropic_classes(&vectors);
    for c in &classes {
        if let Some(v) = c.subspace.points(field).skip(1).find(|v| !iso.contains(v)) {
            return Outcome::Fails(
                "A_u is not contained in I(M)".into(),
                Witness::ClassNotIsotropic { u: c.representative.clone(), v },
            );
        }
    }
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            if let Some(v) = a.subspace.intersection(field, &b.subspace).basis().first() {
                return Outcome::Fails(
                    "two distinct classes A_u, A_w meet nontrivially".into(),
                    Witness::ClassesMeet { u: a.representative.clone(), w: b.representative.clone(), v: v.clone() },
                );
            }
        }
    }
    if let Some(o) = identity_outcome("isotropic-squares", m, budget, String::new()) {
        return o;
    }
    if classes.len() == 1 {
        return Outcome::Fails(
            "I(M)^x is a single class".into(),
            Witness::SingleClass { u: classes[0].representative.clone() },
        );
    }
    let dims: Vec<usize> = classes.iter().map(|c| c.dim).collect();
    Outcome::Holds(format!(
        "|I(M)^x| = {}, r = {} classes of dimensions {dims:?}; sum of (q^d_i-1)^2 matches",
        vectors.len(),
        classes.len()
    ))
}

pub fn check_isotropic_partition(ctx: &Context<'_>) -> VerificationReport {
    let id = "isotropic-partition";
    let s = match spectrum_of(ctx, id) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let m = ctx.m;
    let hyps = vec![h_kind(m, Kind::Symmetric), h_constant(s), h_dim_n(m), h_odd(m), h_q(m.q(), s.max() + 1)];
    ctx.report(id, hyps, || partition_outcome(m, ctx.budget()))
}

// ---------------------------------------------------------------- witt census

pub fn check_witt_census_identity(ctx: &Context<'_>) -> VerificationReport {
    let id = "witt-census";
    let s = match spectrum_of(ctx, id) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let m = ctx.m;
    let top = s.max();
    let hyps = vec![
        h_kind(m, Kind::Symmetric),
        h_constant(s),
        Hypothesis::new("m even", "even", top, top % 2 == 0 && top > 0),
        h_dim_n(m),
        h_odd(m),
    ];
    ctx.report(id, hyps, || {
        if m.field().p() == 2 || !all_symmetric(m) || top % 2 == 1 || m.is_zero() {
            return Outcome::Unknown("needs nonzero symmetric forms of even maximum rank in odd characteristic".into());
        }
        for identity in ["witt-total", "witt-census"] {
            if let Some(o) = identity_outcome(identity, m, ctx.budget(), String::new()) {
                return o;
            }
        }
        match witt_counts(m, ctx.budget()) {
            Ok((a, b, iso)) => Outcome::Holds(format!(
                "A = {a}, B = {b}, |I(M)^x| = {}; |I(M)| q^(d+k) = q^(n+k) + (A-B) q^n",
                iso - 1
            )),
            Err(e) => Outcome::from_budget(e),
        }
    })
}

// ---------------------------------------------------------------- maximality

/// Every element of `m`, zero first.
fn materialize(m: &FormSubspace, budget: u64) -> Result<Vec<Vec<Elt>>, SpanError> {
    let n = m.n();
    let mut elements: Vec<Vec<Elt>> = vec![vec![Elt::ZERO; n * n]];
    m.visit_nonzero(budget, false, |_, e| {
        elements.push(e.to_vec());
        true
    })?;
    Ok(elements)
}

/// Whether `g + f` has rank `rank` for every listed `f`.
fn extends(m: &FormSubspace, elements: &[Vec<Elt>], g: &[Elt], rank: usize) -> bool {
    let field = &**m.field();
    let n = m.n();
    let mut scratch = vec![Elt::ZERO; n * n];
    elements.iter().all(|f| {
        for ((s, &a), &b) in scratch.iter_mut().zip(g).zip(f) {
            *s = field.add(a, b);
        }
        linalg::rank_in_place(field, &mut scratch, n, n) == rank
    })
}

/// A complement of `M` in its ambient kind space, spanned by standard basis forms.
fn complement(m: &FormSubspace) -> FormSubspace {
    let field = &**m.field();
    let n = m.n();
    let mut rows: Vec<Vec<Elt>> = m.basis().iter().map(|f| f.entries().to_vec()).collect();
    let mut forms = Vec::new();
    for b in m.kind().ambient_basis(field, n) {
        rows.push(b.entries().to_vec());
        if linalg::rank(field, &rows, n * n) == rows.len() {
            forms.push(b);
        } else {
            rows.pop();
        }
    }
    FormSubspace::span(m.field().clone(), n, &forms).expect("standard forms")
}

/// A form `g` of the ambient kind space with `g ∉ M` and `M + ⟨g⟩` constant
/// rank `rank`, if one exists. Since only the line of `g` modulo `M` matters,
/// the scan visits one representative per point of a complement, so it is
/// exhaustive over the whole ambient space.
pub fn find_extension(m: &FormSubspace, rank: usize, budget: u64) -> Result<Option<GramForm>, SpanError> {
    let reps = complement(m);
    let needed = reps.size().saturating_mul(m.size()) / (m.q() as u128 - 1);
    if needed > budget as u128 {
        return Err(SpanError::BudgetExceeded { needed, budget });
    }
    let elements = materialize(m, budget)?;
    let n = m.n();
    reps.find_nonzero(budget, true, |_, entries| {
        extends(m, &elements, entries, rank).then(|| GramForm::from_flat(n, entries.to_vec()))
    })
}

/// Random candidates for [`find_extension`], drawn from a seeded stream.
pub fn sample_extension(
    m: &FormSubspace,
    rank: usize,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<Option<GramForm>, SpanError> {
    let ambient = FormSubspace::full(m.field().clone(), m.n(), m.kind());
    let elements = materialize(m, budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let g = ambient.random_element(&mut rng);
        if !g.is_zero() && !m.contains(&g) && extends(m, &elements, g.entries(), rank) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

fn maximality_outcome(ctx: &Context<'_>, s: &RankSpectrum) -> Outcome {
    let m = ctx.m;
    if m.is_zero() {
        return Outcome::Unknown("zero subspace".into());
    }
    let Some(top) = s.constant_rank() else {
        return Outcome::Unknown(format!("maximality is only defined for constant rank subspaces (spectrum {s})"));
    };
    let budget = ctx.budget();
    let fails = |g| Outcome::Fails("M extends to a larger constant rank subspace".into(), Witness::Extension { g });
    match find_extension(m, top, budget) {
        Ok(None) => {
            let ambient = m.kind().ambient_dim(m.n());
            return Outcome::Holds(format!(
                "exhaustive: none of the {} {} forms extends M to a constant rank {top} subspace",
                pow(m.q(), ambient),
                m.kind()
            ));
        }
        Ok(Some(g)) => return fails(g),
        Err(SpanError::BudgetExceeded { .. }) => {}
        Err(e) => return Outcome::from_budget(e),
    }
    match (ctx.options.trials, ctx.options.seed) {
        (Some(trials), Some(seed)) => match sample_extension(m, top, trials, seed, budget) {
            Ok(Some(g)) => fails(g),
            Ok(None) => Outcome::Holds(format!("sampled: no extension found in {trials} trials (seed {seed})")),
            Err(e) => Outcome::from_budget(e),
        },
        _ => Outcome::Budget("exhaustive extension scan exceeds the budget; pass trials and a seed to sample".into()),
    }
}

pub fn check_maximality(ctx: &Context<'_>) -> VerificationReport {
    let id = "maximality";
    let s = match spectrum_of(ctx, id) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let m = ctx.m;
    let top = s.max();
    let radical = m.common_radical(Side::Left);
    let shared = m.dim() > 0 && radical.dim() + top == m.n();
    let nonvanishing = shared
        && check_budget(m.q(), m.n(), ctx.budget()).is_ok()
        && m.isotropic_vectors().iter().all(|v| radical.contains(m.field(), v));
    let hyps = vec![
        h_kind(m, Kind::Symmetric),
        h_constant(s),
        Hypothesis::new("m >= 2", ">= 2", top, top >= 2),
        Hypothesis::new("dim M = m", top, m.dim(), m.dim() == top),
        Hypothesis::new("common radical of dim n-m", m.n() - top, radical.dim(), shared),
        Hypothesis::new("I(M) = common radical", "f(u,u)=0 for all f only on the radical", nonvanishing, nonvanishing),
        h_q(m.q(), top + 1),
    ];
    ctx.report(id, hyps, || maximality_outcome(ctx, s))
}

// ---------------------------------------------------------------- filtration

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationLevel {
    pub s: usize,
    pub dim: usize,
    pub ranks: Vec<usize>,
    /// The vector `w` and side whose kernel produced this level.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Elt>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filtration {
    pub levels: Vec<FiltrationLevel>,
}

/// Extracts `M_r ⊃ M_{r-1} ⊃ … ⊃ M_1` by repeatedly passing to a kernel
/// `M_w` of dimension `(s-1) n` that drops the top rank. Failure reports the
/// level that could not be produced and why; a level of 0 means the budget ran out.
pub fn extract_filtration(m: &FormSubspace, s: &RankSpectrum, budget: u64) -> Result<Filtration, (usize, String)> {
    let ranks = s.ranks();
    let r = ranks.len();
    let n = m.n();
    if m.dim() != r * n {
        return Err((r, format!("dim {} is not r n = {}", m.dim(), r * n)));
    }
    check_budget(m.q(), n, budget).map_err(|e| (0, e.to_string()))?;
    let mut levels = vec![FiltrationLevel { s: r, dim: m.dim(), ranks: ranks.clone(), w: None, side: None }];
    let mut current = m.clone();
    for level in (1..r).rev() {
        let top = ranks[level];
        let target = level * n;
        let mut found = None;
        'search: for w in linalg::vectors(m.field(), n).skip(1) {
            for side in [Side::Left, Side::Right] {
                if current.kernel_dim(&w, side) != target {
                    continue;
                }
                let kernel = current.kernel_at(&w, side).expect("length");
                let spectrum = kernel.rank_spectrum(budget).map_err(|e| (0, e.to_string()))?;
                if !spectrum.ranks().contains(&top) {
                    found = Some((w.clone(), side, kernel, spectrum));
                    break 'search;
                }
            }
        }
        let Some((w, side, kernel, spectrum)) = found else {
            return Err((level, format!("no w with dim M_w = {target} and rank {top} absent")));
        };
        if spectrum.ranks() != ranks[..level] {
            return Err((level, format!("M_w has spectrum {spectrum}, expected {:?}", &ranks[..level])));
        }
        levels.push(FiltrationLevel {
            s: level,
            dim: kernel.dim(),
            ranks: spectrum.ranks(),
            w: Some(w),
            side: Some(side),
        });
        current = kernel;
    }
    Ok(Filtration { levels })
}

pub fn check_filtration(ctx: &Context<'_>) -> VerificationReport {
    let id = "filtration";
    let s = match spectrum_of(ctx, id) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let m = ctx.m;
    let (n, top, r) = (m.n(), s.max(), s.len());
    let hyps = vec![
        h_nonzero(m),
        Hypothesis::new("dim M = rn", r * n, m.dim(), m.dim() == r * n),
        Hypothesis::new("m <= ceil(n/2)", format!("<= {}", n.div_ceil(2)), top, top <= n.div_ceil(2)),
        h_q(m.q(), top + 1),
    ];
    ctx.report(id, hyps, || {
        if m.is_zero() {
            return Outcome::Unknown("zero subspace".into());
        }
        match extract_filtration(m, s, ctx.budget()) {
            Ok(f) => {
                let chain: Vec<String> =
                    f.levels.iter().rev().map(|l| format!("dim {} {:?}", l.dim, l.ranks)).collect();
                Outcome::Holds(format!("chain {}", chain.join(" < ")))
            }
            Err((0, why)) => Outcome::Budget(why),
            Err((level, reason)) => Outcome::Fails(
                format!("extraction stalled at level {level}: {reason}"),
                Witness::Extraction { level, reason },
            ),
        }
    })
}

// ---------------------------------------------------------------- kernel bounds

/// Whether `bound` is one of the lower bounds on `dim M_u` stated for `u`:
/// `dim M - n`, `dim M - (n-1)`, or `dim M - m` when `M_u` has a rank `m` element.
pub(crate) fn kernel_bound_applies(m: &FormSubspace, u: &[Elt], side: Side, bound: usize, budget: u64) -> bool {
    let Ok(s) = m.rank_spectrum(budget) else { return false };
    let (d, n, top) = (m.dim(), m.n(), s.max());
    if bound + n == d || bound + n == d + 1 {
        return true;
    }
    bound + top == d
        && m.kernel_at(u, side).is_ok_and(|k| k.rank_spectrum(budget).is_ok_and(|ks| ks.ranks().contains(&top)))
}

struct KernelScan {
    dims: Vec<(Vec<Elt>, usize, usize)>,
}

fn kernel_scan(m: &FormSubspace, budget: u64) -> Result<KernelScan, SpanError> {
    check_budget(m.q(), m.n(), budget)?;
    let q = m.q() as u64;
    let dims = (1..q.pow(m.n() as u32))
        .into_par_iter()
        .map(|idx| {
            let u = linalg::index_to_vector(q, m.n(), idx);
            let l = m.kernel_dim(&u, Side::Left);
            let r = m.kernel_dim(&u, Side::Right);
            (u, l, r)
        })
        .collect();
    Ok(KernelScan { dims })
}

fn simple_bound_outcome(scan: &KernelScan, d: usize, slack: usize, what: &str) -> Outcome {
    for (u, l, r) in &scan.dims {
        for (side, k) in [(Side::Left, *l), (Side::Right, *r)] {
            if k + slack < d {
                return Outcome::Fails(
                    format!("dim M_u = {k} < dim M - {slack}"),
                    Witness::KernelBelowBound { u: u.clone(), side, dim: k, bound: d - slack },
                );
            }
        }
    }
    Outcome::Holds(format!("dim M_u >= dim M - {what} for every u and side"))
}

fn improved_outcome(m: &FormSubspace, scan: &KernelScan, top: usize, budget: u64) -> Outcome {
    let d = m.dim();
    let field = &**m.field();
    let candidates: Vec<(Vec<Elt>, Side)> = scan
        .dims
        .iter()
        .flat_map(|(u, l, r)| [(u.clone(), Side::Left, *l), (u.clone(), Side::Right, *r)])
        .filter(|(_, _, k)| k + top <= d)
        .map(|(u, side, _)| (u, side))
        .collect();
    let work: u128 = candidates.iter().map(|(u, side)| pow(m.q(), m.kernel_dim(u, *side))).sum();
    if work > budget as u128 {
        return Outcome::Budget(format!("kernel enumeration needs {work} steps"));
    }
    let opposite = |side: Side| if side == Side::Left { Side::Right } else { Side::Left };
    let found = candidates.par_iter().find_map_first(|(u, side)| {
        let kernel = m.kernel_at(u, *side).expect("length");
        let n = kernel.n();
        let mut reps: BTreeMap<Subspace, GramForm> = BTreeMap::new();
        kernel
            .visit_nonzero(budget, true, |_, entries| {
                let f = GramForm::from_flat(n, entries.to_vec());
                if f.rank(field) == top {
                    reps.entry(f.radical(field, opposite(*side))).or_insert(f);
                }
                reps.len() < 2 || kernel.dim() + top < d
            })
            .ok()?;
        if reps.is_empty() {
            return None;
        }
        if kernel.dim() + top < d {
            return Some(Witness::KernelBelowBound { u: u.clone(), side: *side, dim: kernel.dim(), bound: d - top });
        }
        if reps.len() >= 2 {
            let mut it = reps.into_values();
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            return Some(Witness::KernelRadicals { u: u.clone(), side: *side, a, b });
        }
        None
    });
    match found {
        None => Outcome::Holds(format!(
            "dim M_u >= dim M - {top} whenever M_u has a rank {top} element; equality cases share one radical"
        )),
        Some(w) => Outcome::Fails("improved kernel bound fails".into(), w),
    }
}

pub fn check_kernel_bounds(ctx: &Context<'_>) -> Vec<VerificationReport> {
    let s = match spectrum_of(ctx, "kernel-bound") {
        Ok(s) => s,
        Err(r) => return vec![r],
    };
    let m = ctx.m;
    let top = s.max();
    let scan = kernel_scan(m, ctx.budget());
    let with_scan = |f: &dyn Fn(&KernelScan) -> Outcome| match &scan {
        Ok(sc) => f(sc),
        Err(e) => Outcome::Budget(e.to_string()),
    };
    vec![
        ctx.report("kernel-bound", Vec::new(), || with_scan(&|sc| simple_bound_outcome(sc, m.dim(), m.n(), "n"))),
        ctx.report("kernel-bound-improved", vec![h_nonzero(m), h_q(m.q(), top + 1)], || {
            if m.is_zero() {
                return Outcome::Holds("zero subspace".into());
            }
            with_scan(&|sc| improved_outcome(m, sc, top, ctx.budget()))
        }),
        ctx.report("kernel-bound-alternating", vec![h_kind(m, Kind::Alternating)], || {
            with_scan(&|sc| simple_bound_outcome(sc, m.dim(), m.n().saturating_sub(1), "(n-1)"))
        }),
    ]
}

// ---------------------------------------------------------------- V(M)

fn not_closed(m: &FormSubspace, points: &[Vec<Elt>], side: Side) -> Option<Witness> {
    let field = &**m.field();
    let set: HashSet<&Vec<Elt>> = points.iter().collect();
    for a in points {
        for b in points {
            let sum: Vec<Elt> = a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect();
            if !set.contains(&sum) {
                return Some(Witness::NotClosed { side, a: a.clone(), b: b.clone() });
            }
        }
    }
    None
}

fn orthogonal(m: &FormSubspace, us: &Subspace, ws: &Subspace, w_side: Side) -> Option<Witness> {
    let field = &**m.field();
    for u in us.basis() {
        for w in ws.basis() {
            for (gi, g) in m.basis().iter().enumerate() {
                let value = g.eval_unchecked(field, u, w);
                if !value.is_zero() {
                    return Some(Witness::VsetNotOrthogonal { u: u.clone(), w: w.clone(), w_side, g: gi, value });
                }
            }
        }
    }
    None
}

fn vset_outcome(m: &FormSubspace, budget: u64, sides: &[Side]) -> Outcome {
    let mut sets = Vec::new();
    for &side in sides {
        match m.v_set(side, budget) {
            Ok(v) => {
                if !v.is_subspace {
                    if let Some(w) = not_closed(m, &v.points, side) {
                        return Outcome::Fails(format!("V(M)^{side:?} is not closed under addition"), w);
                    }
                }
                sets.push(v.span);
            }
            Err(e) => return Outcome::from_budget(e),
        }
    }
    let (us, ws) = (&sets[0], sets.last().expect("one side"));
    match orthogonal(m, us, ws, *sides.last().expect("one side")) {
        Some(w) => Outcome::Fails("M does not vanish on the V(M) pair".into(), w),
        None => Outcome::Holds(format!("V(M) is a subspace of dimension {} annihilated by M", us.dim())),
    }
}

pub fn check_vset(ctx: &Context<'_>) -> Vec<VerificationReport> {
    let s = match spectrum_of(ctx, "vset") {
        Ok(s) => s,
        Err(r) => return vec![r],
    };
    let m = ctx.m;
    let top = s.max();
    let d = m.dim();
    vec![
        ctx.report(
            "vset-subspace",
            vec![
                h_constant(s),
                Hypothesis::new("dim M >= 2m+1", format!(">= {}", 2 * top + 1), d, d > 2 * top),
                h_q(m.q(), top + 1),
            ],
            || vset_outcome(m, ctx.budget(), &[Side::Left, Side::Right]),
        ),
        ctx.report(
            "vset-alternating",
            vec![
                h_kind(m, Kind::Alternating),
                h_constant(s),
                h_q(m.q(), top + 1),
                Hypothesis::new("m > 2", "> 2", top, top > 2),
                Hypothesis::new("dim M >= 2m-1", format!(">= {}", (2 * top).saturating_sub(1)), d, d + 1 >= 2 * top),
            ],
            || vset_outcome(m, ctx.budget(), &[Side::Left]),
        ),
    ]
}

// ---------------------------------------------------------------- claims

pub fn check_claims(ctx: &Context<'_>, claims: &Claims) -> VerificationReport {
    ctx.report("claims", Vec::new(), || match constructions::check_claims(ctx.m, claims, ctx.budget()) {
        Err(e) => Outcome::from_budget(e),
        Ok(checks) => match checks.iter().find(|c| !c.ok) {
            None => Outcome::Holds(format!("{} claims confirmed", checks.len())),
            Some(c) => Outcome::Fails(
                format!("claim {} is {}, recorded {}", c.claim, c.actual, c.expected),
                Witness::Claim { claim: c.claim.clone(), expected: c.expected.clone(), actual: c.actual.clone() },
            ),
        },
    })
}
