//! Subspaces `M` of bilinear forms: canonical bases, exhaustive enumeration
//! of `M^×`, rank spectra and the derived kernels, point sets and spreads.

mod derived;
mod random;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formcore::{linalg, Classification, FormError, GramForm, Side, Subspace};
use crate::gf::{Elt, Field};

pub use derived::{IsotropicClass, IsotropicSet, SpreadReport, VSet};
pub use random::{random_subspace, random_subspace_of};

/// Default enumeration budget, in elements visited.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

const CHUNK: u64 = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpanError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("form {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("basis row {index} is linearly dependent on the rows before it")]
    Dependent { index: usize },
    #[error("form {index} is not {kind}")]
    KindMismatch { index: usize, kind: Kind },
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("requested dimension {d} exceeds {max}")]
    DimensionTooLarge { d: usize, max: usize },
    #[error("subspace is not constant rank (spectrum {0:?})")]
    NotConstantRank(Vec<usize>),
    #[error("operation needs a {0} subspace")]
    WrongKind(Kind),
    #[error("operation needs odd characteristic")]
    EvenCharacteristic,
    #[error("vector has length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
}

/// The ambient space a subspace lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    General,
    Alternating,
    Symmetric,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::General => "general",
            Kind::Alternating => "alternating",
            Kind::Symmetric => "symmetric",
        })
    }
}

impl std::str::FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Kind, String> {
        match s {
            "general" | "bilinear" => Ok(Kind::General),
            "alternating" | "alt" => Ok(Kind::Alternating),
            "symmetric" | "symm" => Ok(Kind::Symmetric),
            other => Err(format!("unknown kind `{other}`")),
        }
    }
}

impl Kind {
    pub fn admits(self, field: &Field, f: &GramForm) -> bool {
        match self {
            Kind::General => true,
            Kind::Alternating => f.is_alternating(field),
            Kind::Symmetric => f.is_symmetric(),
        }
    }

    /// Dimension of the whole kind space on `K^n`.
    pub fn ambient_dim(self, n: usize) -> usize {
        match self {
            Kind::General => n * n,
            Kind::Alternating => n * n.saturating_sub(1) / 2,
            Kind::Symmetric => n * (n + 1) / 2,
        }
    }

    /// Standard basis of the kind space.
    pub fn ambient_basis(self, field: &Field, n: usize) -> Vec<GramForm> {
        let unit = |pairs: &[(usize, usize, Elt)]| {
            let mut f = GramForm::zero(n);
            for &(i, j, v) in pairs {
                f.set(i, j, v);
            }
            f
        };
        let minus_one = field.neg(Elt::ONE);
        let mut out = Vec::new();
        match self {
            Kind::General => {
                for i in 0..n {
                    for j in 0..n {
                        out.push(unit(&[(i, j, Elt::ONE)]));
                    }
                }
            }
            Kind::Symmetric => {
                for i in 0..n {
                    for j in i..n {
                        out.push(unit(&[(i, j, Elt::ONE), (j, i, Elt::ONE)]));
                    }
                }
            }
            Kind::Alternating => {
                for i in 0..n {
                    for j in i + 1..n {
                        out.push(unit(&[(i, j, Elt::ONE), (j, i, minus_one)]));
                    }
                }
            }
        }
        out
    }
}

/// Checks that `q^d` steps fit in `budget`.
pub fn check_budget(q: u32, d: usize, budget: u64) -> Result<(), SpanError> {
    let needed = (q as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        Err(SpanError::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// A subspace of `Bil(V)` with a canonical basis: the reduced row-echelon
/// form of the basis flattened to vectors of length `n²`.
#[derive(Clone, Debug)]
pub struct FormSubspace {
    field: Arc<Field>,
    n: usize,
    basis: Vec<GramForm>,
    kind: Kind,
}

impl PartialEq for FormSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.n == other.n && self.basis == other.basis
    }
}

impl Eq for FormSubspace {}

/// The tightest kind admitting every form.
fn tightest_kind(field: &Field, forms: &[GramForm]) -> Kind {
    if forms.is_empty() {
        Kind::General
    } else if forms.iter().all(|f| f.classify(field) == Classification::Alternating) {
        Kind::Alternating
    } else if forms.iter().all(GramForm::is_symmetric) {
        Kind::Symmetric
    } else {
        Kind::General
    }
}

fn canonical_basis(field: &Field, n: usize, forms: &[GramForm]) -> Vec<GramForm> {
    let mut rows: Vec<Vec<Elt>> = forms.iter().map(|f| f.entries().to_vec()).collect();
    linalg::rref(field, &mut rows, n * n);
    rows.into_iter().map(|r| GramForm::from_flat(n, r)).collect()
}

impl FormSubspace {
    pub fn zero(field: Arc<Field>, n: usize) -> FormSubspace {
        FormSubspace { field, n, basis: Vec::new(), kind: Kind::General }
    }

    /// The whole kind space, e.g. `Alt(V)`.
    pub fn full(field: Arc<Field>, n: usize, kind: Kind) -> FormSubspace {
        let forms = kind.ambient_basis(&field, n);
        FormSubspace::span(field, n, &forms).expect("standard basis is well formed").with_kind_unchecked(kind)
    }

    /// The span of `forms`, with the tightest kind tag that fits.
    pub fn span(field: Arc<Field>, n: usize, forms: &[GramForm]) -> Result<FormSubspace, SpanError> {
        for (index, f) in forms.iter().enumerate() {
            if f.n() != n {
                return Err(SpanError::DimensionMismatch { index, expected: n, got: f.n() });
            }
            f.check_field(&field)?;
        }
        let basis = canonical_basis(&field, n, forms);
        let kind = tightest_kind(&field, &basis);
        Ok(FormSubspace { field, n, basis, kind })
    }

    /// Like [`FormSubspace::span`], but the input must already be linearly
    /// independent; the first dependent form is reported by index.
    pub fn from_independent(field: Arc<Field>, n: usize, forms: &[GramForm]) -> Result<FormSubspace, SpanError> {
        for (index, f) in forms.iter().enumerate() {
            if f.n() != n {
                return Err(SpanError::DimensionMismatch { index, expected: n, got: f.n() });
            }
            f.check_field(&field)?;
        }
        let mut rows: Vec<Vec<Elt>> = Vec::new();
        for (index, f) in forms.iter().enumerate() {
            rows.push(f.entries().to_vec());
            if linalg::rank(&field, &rows, n * n) < rows.len() {
                return Err(SpanError::Dependent { index });
            }
        }
        FormSubspace::span(field, n, forms)
    }

    /// Retags the subspace, checking every basis form against `kind`.
    pub fn with_kind(self, kind: Kind) -> Result<FormSubspace, SpanError> {
        if let Some(index) = self.basis.iter().position(|f| !kind.admits(&self.field, f)) {
            return Err(SpanError::KindMismatch { index, kind });
        }
        Ok(FormSubspace { kind, ..self })
    }

    fn with_kind_unchecked(self, kind: Kind) -> FormSubspace {
        FormSubspace { kind, ..self }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[GramForm] {
        &self.basis
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// `q^d`, saturating.
    pub fn size(&self) -> u128 {
        (self.q() as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// `Σ c_i B_i`.
    pub fn form(&self, coeffs: &[Elt]) -> GramForm {
        let n2 = self.n * self.n;
        let mut acc = vec![Elt::ZERO; n2];
        for (&c, b) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (a, &x) in acc.iter_mut().zip(b.entries()) {
                *a = self.field.add(*a, self.field.mul(c, x));
            }
        }
        GramForm::from_flat(self.n, acc)
    }

    pub fn contains(&self, f: &GramForm) -> bool {
        if f.n() != self.n {
            return false;
        }
        let mut rows: Vec<Vec<Elt>> = self.basis.iter().map(|b| b.entries().to_vec()).collect();
        rows.push(f.entries().to_vec());
        linalg::rank(&self.field, &rows, self.n * self.n) == self.dim()
    }

    /// `M + span{f}`, keeping this subspace's kind if `f` fits it.
    pub fn extended(&self, f: &GramForm) -> FormSubspace {
        let mut forms = self.basis.clone();
        forms.push(f.clone());
        let basis = canonical_basis(&self.field, self.n, &forms);
        let kind = if self.kind.admits(&self.field, f) { self.kind } else { tightest_kind(&self.field, &basis) };
        FormSubspace { field: self.field.clone(), n: self.n, basis, kind }
    }

    /// The subspace spanned by `Σ c_i B_i` for each coefficient vector.
    pub fn subspace_from_coeffs(&self, coeffs: &[Vec<Elt>]) -> FormSubspace {
        let forms: Vec<GramForm> = coeffs.iter().map(|c| self.form(c)).collect();
        let basis = canonical_basis(&self.field, self.n, &forms);
        FormSubspace { field: self.field.clone(), n: self.n, basis, kind: self.kind }
    }

    /// Whether `N ⊆ M`.
    pub fn contains_subspace(&self, other: &FormSubspace) -> bool {
        other.basis.iter().all(|f| self.contains(f))
    }

    /// Vectors lying in the given radical of every form of `M`.
    pub fn common_radical(&self, side: Side) -> Subspace {
        let n = self.n;
        let mut rows = Vec::new();
        for b in &self.basis {
            for j in 0..n {
                rows.push(match side {
                    Side::Left => (0..n).map(|i| b.get(i, j)).collect(),
                    Side::Right => (0..n).map(|i| b.get(j, i)).collect(),
                });
            }
        }
        Subspace::span(&self.field, n, &linalg::null_space(&self.field, &rows, n))
    }

    fn multiples(&self) -> Vec<Elt> {
        let n2 = self.n * self.n;
        let q = self.q() as usize;
        let mut table = vec![Elt::ZERO; self.dim() * q * n2];
        for (i, b) in self.basis.iter().enumerate() {
            for c in 0..q {
                let off = (i * q + c) * n2;
                for (slot, &x) in table[off..off + n2].iter_mut().zip(b.entries()) {
                    *slot = self.field.mul(Elt(c as u32), x);
                }
            }
        }
        table
    }

    /// Work units covering `M^×` (or one representative per line when
    /// `projective`), listed in increasing lexicographic order of the
    /// coefficient vector, first coordinate most significant.
    fn chunks(&self, projective: bool) -> Vec<Chunk> {
        let d = self.dim();
        let q = self.q() as u64;
        let mut out = Vec::new();
        for lead in (0..d).rev() {
            let len = q.pow((d - lead - 1) as u32);
            let leads: Vec<u32> = if projective { vec![1] } else { (1..q as u32).collect() };
            for a in leads {
                let mut start = 0;
                while start < len {
                    let end = (start + CHUNK).min(len);
                    out.push(Chunk { lead, lead_val: Elt(a), start, end });
                    start = end;
                }
            }
        }
        out
    }

    fn run_chunk(&self, mults: &[Elt], chunk: &Chunk, mut visit: impl FnMut(&[Elt], &[Elt]) -> bool) {
        let d = self.dim();
        let n2 = self.n * self.n;
        let q = self.q() as usize;
        let field = &*self.field;
        let mut coeffs = vec![Elt::ZERO; d];
        coeffs[chunk.lead] = chunk.lead_val;
        let tail = linalg::index_to_vector(q as u64, d - chunk.lead - 1, chunk.start);
        coeffs[chunk.lead + 1..].copy_from_slice(&tail);
        let mut sums = vec![Elt::ZERO; (d + 1) * n2];
        let recompute = |sums: &mut [Elt], coeffs: &[Elt], from: usize| {
            for i in from..d {
                let (lo, hi) = sums.split_at_mut((i + 1) * n2);
                let prev = &lo[i * n2..];
                let add = &mults[(i * q + coeffs[i].0 as usize) * n2..][..n2];
                for ((out, &a), &b) in hi[..n2].iter_mut().zip(prev).zip(add) {
                    *out = field.add(a, b);
                }
            }
        };
        recompute(&mut sums, &coeffs, chunk.lead);
        let mut idx = chunk.start;
        loop {
            if !visit(&coeffs, &sums[d * n2..]) {
                return;
            }
            idx += 1;
            if idx == chunk.end {
                return;
            }
            let mut p = d - 1;
            while coeffs[p].0 as usize == q - 1 {
                coeffs[p] = Elt::ZERO;
                p -= 1;
            }
            coeffs[p] = Elt(coeffs[p].0 + 1);
            recompute(&mut sums, &coeffs, p);
        }
    }

    /// Folds over `M^×` in parallel. Each worker gets a fresh accumulator;
    /// results are merged in enumeration order, so any associative `merge`
    /// gives a deterministic answer. The visitor sees the coefficient vector
    /// and the row-major Gram entries of each element.
    pub fn fold_nonzero<T, I, V, R>(
        &self,
        budget: u64,
        projective: bool,
        init: I,
        visit: V,
        merge: R,
    ) -> Result<T, SpanError>
    where
        T: Send,
        I: Fn() -> T + Sync,
        V: Fn(&mut T, &[Elt], &[Elt]) + Sync,
        R: Fn(T, T) -> T,
    {
        check_budget(self.q(), self.dim(), budget)?;
        let mults = self.multiples();
        let parts: Vec<T> = self
            .chunks(projective)
            .par_iter()
            .map(|c| {
                let mut acc = init();
                self.run_chunk(&mults, c, |co, en| {
                    visit(&mut acc, co, en);
                    true
                });
                acc
            })
            .collect();
        Ok(parts.into_iter().fold(init(), merge))
    }

    /// The lexicographically first element of `M^×` for which `pred` yields a value.
    pub fn find_nonzero<R, P>(&self, budget: u64, projective: bool, pred: P) -> Result<Option<R>, SpanError>
    where
        R: Send,
        P: Fn(&[Elt], &[Elt]) -> Option<R> + Sync,
    {
        check_budget(self.q(), self.dim(), budget)?;
        let mults = self.multiples();
        Ok(self.chunks(projective).par_iter().find_map_first(|c| {
            let mut found = None;
            self.run_chunk(&mults, c, |co, en| {
                found = pred(co, en);
                found.is_none()
            });
            found
        }))
    }

    /// Sequential walk over `M^×` in lexicographic order; stops when `visit` returns false.
    pub fn visit_nonzero(
        &self,
        budget: u64,
        projective: bool,
        mut visit: impl FnMut(&[Elt], &[Elt]) -> bool,
    ) -> Result<(), SpanError> {
        check_budget(self.q(), self.dim(), budget)?;
        let mults = self.multiples();
        for c in self.chunks(projective) {
            let mut go = true;
            self.run_chunk(&mults, &c, |co, en| {
                go = visit(co, en);
                go
            });
            if !go {
                break;
            }
        }
        Ok(())
    }

    /// Every nonzero element with its coefficient vector, in lexicographic order.
    pub fn enumerate_nonzero(&self, budget: u64) -> Result<impl Iterator<Item = (Vec<Elt>, GramForm)> + '_, SpanError> {
        check_budget(self.q(), self.dim(), budget)?;
        let q = self.q() as u64;
        let d = self.dim();
        Ok((1..q.pow(d as u32)).map(move |idx| {
            let c = linalg::index_to_vector(q, d, idx);
            let f = self.form(&c);
            (c, f)
        }))
    }

    pub fn rank_spectrum(&self, budget: u64) -> Result<RankSpectrum, SpanError> {
        let n = self.n;
        let field = &*self.field;
        let counts = self.fold_nonzero(
            budget,
            true,
            || (BTreeMap::<usize, u64>::new(), Vec::new()),
            |(map, scratch), _, entries| {
                scratch.clear();
                scratch.extend_from_slice(entries);
                *map.entry(linalg::rank_in_place(field, scratch, n, n)).or_insert(0) += 1;
            },
            |(mut a, s), (b, _)| {
                for (r, c) in b {
                    *a.entry(r).or_insert(0) += c;
                }
                (a, s)
            },
        )?;
        let scale = self.q() as u64 - 1;
        Ok(RankSpectrum {
            counts: counts.0.into_iter().map(|(rank, c)| RankCount { rank, count: c * scale }).collect(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct Chunk {
    lead: usize,
    lead_val: Elt,
    start: u64,
    end: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCount {
    pub rank: usize,
    pub count: u64,
}

/// Distinct nonzero ranks of `M^×`, ascending, with how many elements have each.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankSpectrum {
    pub counts: Vec<RankCount>,
}

impl RankSpectrum {
    pub fn ranks(&self) -> Vec<usize> {
        self.counts.iter().map(|c| c.rank).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// The largest rank `m`; zero for the zero subspace.
    pub fn max(&self) -> usize {
        self.counts.last().map_or(0, |c| c.rank)
    }

    pub fn min(&self) -> usize {
        self.counts.first().map_or(0, |c| c.rank)
    }

    /// Number of distinct ranks, `|rank(M)|`.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn constant_rank(&self) -> Option<usize> {
        match self.counts.as_slice() {
            [only] => Some(only.rank),
            _ => None,
        }
    }

    pub fn count(&self, rank: usize) -> u64 {
        self.counts.iter().find(|c| c.rank == rank).map_or(0, |c| c.count)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|c| c.count).sum()
    }

    pub fn is_subset_of(&self, other: &RankSpectrum) -> bool {
        let theirs = other.ranks();
        self.counts.iter().all(|c| theirs.contains(&c.rank))
    }
}

impl std::fmt::Display for RankSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ranks: Vec<String> = self.ranks().iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", ranks.join(","))
    }
}
