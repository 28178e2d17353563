use serde::{Deserialize, Serialize};

use super::checks;
use crate::constructions::claim_value;
use crate::formcore::{GramForm, Side};
use crate::gf::Elt;
use crate::spanspace::FormSubspace;

/// Counterexample data. Vectors and coefficient vectors are element codes;
/// coefficient vectors refer to the canonical basis of the subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    /// `g(u, w) ≠ 0` for a basis form `g`, with `u`, `w` in the left and right
    /// radicals of a maximum-rank element `f`.
    NonOrthogonal { f: Vec<Elt>, g: usize, u: Vec<Elt>, w: Vec<Elt>, value: Elt },
    /// Two sides of an exact identity that disagree.
    CountMismatch { identity: String, lhs: String, rhs: String },
    /// The dimension exceeds a bound.
    DimensionBound { bound: String, dim: usize, limit: String },
    /// Elements `a`, `b` with distinct radicals that share the nonzero vector `v`.
    RadicalsMeet { a: Vec<Elt>, b: Vec<Elt>, v: Vec<Elt> },
    /// A nonzero vector in no radical of `M^×`.
    Uncovered { v: Vec<Elt> },
    /// Two pairs of elements, one with distinct left radicals, one with distinct right radicals.
    RadicalsDiffer { left: [Vec<Elt>; 2], right: [Vec<Elt>; 2] },
    /// `A_u ≠ A_w` but they share the nonzero vector `v`.
    ClassesMeet { u: Vec<Elt>, w: Vec<Elt>, v: Vec<Elt> },
    /// `v ∈ A_u` is not in `I(M)`.
    ClassNotIsotropic { u: Vec<Elt>, v: Vec<Elt> },
    /// `dim A_u ≠ dim M_u`.
    ClassDimension { u: Vec<Elt>, annihilator: usize, kernel: usize },
    /// All of `I(M)^×` lies in the single class `A_u`.
    SingleClass { u: Vec<Elt> },
    /// `M + span{g}` is still constant rank.
    Extension { g: GramForm },
    /// `dim M_u` below a lower bound.
    KernelBelowBound { u: Vec<Elt>, side: Side, dim: usize, bound: usize },
    /// Two maximum-rank elements of `M_u` (equality case) with different opposite radicals.
    KernelRadicals { u: Vec<Elt>, side: Side, a: GramForm, b: GramForm },
    /// `a`, `b` lie in `V(M)` but `a + b` does not.
    NotClosed { side: Side, a: Vec<Elt>, b: Vec<Elt> },
    /// `g(u, w) ≠ 0` with `u ∈ V(M)^L` and `w` in `V(M)` on side `w_side`.
    VsetNotOrthogonal { u: Vec<Elt>, w: Vec<Elt>, w_side: Side, g: usize, value: Elt },
    /// The filtration recipe stalled at level `level`.
    Extraction { level: usize, reason: String },
    /// A recorded claim disagrees with the subspace.
    Claim { claim: String, expected: String, actual: String },
}

impl Witness {
    /// Recomputes the violation from `m` using only the form primitives and
    /// the subspace data; true when it is reproduced exactly.
    pub fn replay(&self, m: &FormSubspace, budget: u64) -> bool {
        let field = &**m.field();
        let n = m.n();
        let vec_ok = |v: &[Elt]| v.len() == n && v.iter().all(|e| e.0 < field.q());
        let coeff_ok =
            |c: &[Elt]| c.len() == m.dim() && c.iter().any(|e| !e.is_zero()) && c.iter().all(|e| e.0 < field.q());
        let isotropic = |v: &[Elt]| m.basis().iter().all(|f| f.eval_unchecked(field, v, v).is_zero());
        match self {
            Witness::NonOrthogonal { f, g, u, w, value } => {
                if !(coeff_ok(f) && vec_ok(u) && vec_ok(w) && *g < m.dim()) {
                    return false;
                }
                let Ok(spectrum) = m.rank_spectrum(budget) else { return false };
                let form = m.form(f);
                form.rank(field) == spectrum.max()
                    && form.left_radical(field).contains(field, u)
                    && form.right_radical(field).contains(field, w)
                    && m.basis()[*g].evaluate(field, u, w).ok() == Some(*value)
                    && !value.is_zero()
            }
            Witness::CountMismatch { identity, lhs, rhs } => match checks::identity_sides(identity, m, budget) {
                Some((l, r)) => &l == lhs && &r == rhs && l != r,
                None => false,
            },
            Witness::DimensionBound { bound, dim, limit } => {
                let Ok(spectrum) = m.rank_spectrum(budget) else { return false };
                checks::bound_specs(m, &spectrum, budget)
                    .into_iter()
                    .find(|b| &b.id == bound)
                    .is_some_and(|b| m.dim() == *dim && b.expr == *limit && !b.holds(m.dim()))
            }
            Witness::RadicalsMeet { a, b, v } => {
                if !(coeff_ok(a) && coeff_ok(b) && vec_ok(v)) || v.iter().all(|e| e.is_zero()) {
                    return false;
                }
                let ra = m.form(a).right_radical(field);
                let rb = m.form(b).right_radical(field);
                ra != rb && ra.contains(field, v) && rb.contains(field, v)
            }
            Witness::Uncovered { v } => {
                vec_ok(v) && v.iter().any(|e| !e.is_zero()) && m.kernel_dim(v, Side::Right) == 0
            }
            Witness::RadicalsDiffer { left, right } => {
                if !left.iter().chain(right).all(|c| coeff_ok(c)) {
                    return false;
                }
                m.form(&left[0]).left_radical(field) != m.form(&left[1]).left_radical(field)
                    && m.form(&right[0]).right_radical(field) != m.form(&right[1]).right_radical(field)
            }
            Witness::ClassesMeet { u, w, v } => {
                if !(vec_ok(u) && vec_ok(w) && vec_ok(v)) || v.iter().all(|e| e.is_zero()) {
                    return false;
                }
                let (Ok(au), Ok(aw)) = (m.annihilator(u), m.annihilator(w)) else { return false };
                isotropic(u) && isotropic(w) && au != aw && au.contains(field, v) && aw.contains(field, v)
            }
            Witness::ClassNotIsotropic { u, v } => {
                if !(vec_ok(u) && vec_ok(v)) || v.iter().all(|e| e.is_zero()) {
                    return false;
                }
                isotropic(u) && m.annihilator(u).is_ok_and(|a| a.contains(field, v)) && !isotropic(v)
            }
            Witness::ClassDimension { u, annihilator, kernel } => {
                vec_ok(u)
                    && m.annihilator(u).is_ok_and(|a| a.dim() == *annihilator)
                    && m.kernel_dim(u, Side::Left) == *kernel
                    && annihilator != kernel
            }
            Witness::SingleClass { u } => {
                if !vec_ok(u) || !isotropic(u) {
                    return false;
                }
                let Ok(au) = m.annihilator(u) else { return false };
                let vectors = m.isotropic_vectors();
                !vectors.is_empty() && vectors.iter().all(|v| m.annihilator(v).is_ok_and(|a| a == au))
            }
            Witness::Extension { g } => {
                if g.n() != n || g.check_field(field).is_err() || m.contains(g) {
                    return false;
                }
                let (Ok(before), Ok(after)) = (m.rank_spectrum(budget), m.extended(g).rank_spectrum(budget)) else {
                    return false;
                };
                before.constant_rank().is_some() && after.ranks() == before.ranks()
            }
            Witness::KernelBelowBound { u, side, dim, bound } => {
                vec_ok(u)
                    && m.kernel_dim(u, *side) == *dim
                    && dim < bound
                    && checks::kernel_bound_applies(m, u, *side, *bound, budget)
            }
            Witness::KernelRadicals { u, side, a, b } => {
                if !vec_ok(u) || a.n() != n || b.n() != n || !m.contains(a) || !m.contains(b) {
                    return false;
                }
                let Ok(spectrum) = m.rank_spectrum(budget) else { return false };
                let top = spectrum.max();
                let opposite = match side {
                    Side::Left => Side::Right,
                    Side::Right => Side::Left,
                };
                a.rank(field) == top
                    && b.rank(field) == top
                    && a.radical(field, *side).contains(field, u)
                    && b.radical(field, *side).contains(field, u)
                    && m.kernel_dim(u, *side) + top == m.dim()
                    && a.radical(field, opposite) != b.radical(field, opposite)
            }
            Witness::NotClosed { side, a, b } => {
                if !(vec_ok(a) && vec_ok(b)) {
                    return false;
                }
                let sum: Vec<Elt> = a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect();
                m.kernel_dim(a, *side) > 0 && m.kernel_dim(b, *side) > 0 && m.kernel_dim(&sum, *side) == 0
            }
            Witness::VsetNotOrthogonal { u, w, w_side, g, value } => {
                vec_ok(u)
                    && vec_ok(w)
                    && *g < m.dim()
                    && m.kernel_dim(u, Side::Left) > 0
                    && m.kernel_dim(w, *w_side) > 0
                    && m.basis()[*g].evaluate(field, u, w).ok() == Some(*value)
                    && !value.is_zero()
            }
            Witness::Extraction { level, reason } => match m.rank_spectrum(budget) {
                Ok(spectrum) => match checks::extract_filtration(m, &spectrum, budget) {
                    Err((l, r)) => l == *level && &r == reason,
                    Ok(_) => false,
                },
                Err(_) => false,
            },
            Witness::Claim { claim, expected, actual } => {
                matches!(claim_value(m, claim, expected, budget), Ok(Some(a)) if &a == actual && a != *expected)
            }
        }
    }
}
