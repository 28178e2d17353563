//! Bilinear forms as Gram matrices, subspaces of `V = K^n`, and the
//! per-form primitives: rank, left and right radicals, classification,
//! evaluation and the Witt census of a symmetric form.

pub mod linalg;
mod witt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elt, Field};

pub use witt::{isotropic_count_enumerated, witt_census, WittCensus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Gram matrix must be square with {n}x{n} entries")]
    NotSquare { n: usize },
    #[error("entry code {code} is not an element of GF({q})")]
    BadEntry { code: u32, q: u32 },
    #[error("form is not symmetric")]
    NotSymmetric,
    #[error("Witt census needs odd characteristic, field has characteristic {0}")]
    EvenCharacteristic(u32),
}

/// Which side of a form a radical or kernel refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Alternating,
    SymmetricNotAlternating,
    General,
}

/// A bilinear form on `K^n`; entry `(i, j)` is `f(e_i, e_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "GramRows", try_from = "GramRows")]
pub struct GramForm {
    n: usize,
    entries: Vec<Elt>,
}

#[derive(Serialize, Deserialize)]
struct GramRows {
    n: usize,
    rows: Vec<Vec<Elt>>,
}

impl From<GramForm> for GramRows {
    fn from(f: GramForm) -> GramRows {
        GramRows { n: f.n, rows: f.rows() }
    }
}

impl TryFrom<GramRows> for GramForm {
    type Error = FormError;
    fn try_from(g: GramRows) -> Result<GramForm, FormError> {
        GramForm::from_rows(g.n, &g.rows)
    }
}

impl GramForm {
    pub fn zero(n: usize) -> GramForm {
        GramForm { n, entries: vec![Elt::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> GramForm {
        let mut f = GramForm::zero(n);
        for i in 0..n {
            f.set(i, i, Elt::ONE);
        }
        f
    }

    pub fn from_rows(n: usize, rows: &[Vec<Elt>]) -> Result<GramForm, FormError> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(FormError::NotSquare { n });
        }
        Ok(GramForm { n, entries: rows.iter().flatten().copied().collect() })
    }

    /// Builds a form from raw codes, checking them against `field`.
    pub fn from_codes(field: &Field, rows: &[&[u32]]) -> Result<GramForm, FormError> {
        let n = rows.len();
        let mut out = Vec::with_capacity(n);
        for row in rows {
            let mut r = Vec::with_capacity(row.len());
            for &code in *row {
                r.push(field.elt(code).map_err(|_| FormError::BadEntry { code, q: field.q() })?);
            }
            out.push(r);
        }
        GramForm::from_rows(n, &out)
    }

    pub(crate) fn from_flat(n: usize, entries: Vec<Elt>) -> GramForm {
        debug_assert_eq!(entries.len(), n * n);
        GramForm { n, entries }
    }

    /// Rejects entries that are not codes of `field`.
    pub fn check_field(&self, field: &Field) -> Result<(), FormError> {
        match self.entries.iter().find(|e| e.0 >= field.q()) {
            Some(e) => Err(FormError::BadEntry { code: e.0, q: field.q() }),
            None => Ok(()),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elt {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elt) {
        self.entries[i * self.n + j] = v;
    }

    /// Entries row by row; this is also the flattening used for linear
    /// independence of forms.
    pub fn entries(&self) -> &[Elt] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Elt>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(<[Elt]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> GramForm {
        let mut t = GramForm::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn add(&self, field: &Field, other: &GramForm) -> GramForm {
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| field.add(a, b)).collect();
        GramForm { n: self.n, entries }
    }

    pub fn scale(&self, field: &Field, c: Elt) -> GramForm {
        GramForm { n: self.n, entries: self.entries.iter().map(|&a| field.mul(c, a)).collect() }
    }

    /// `P^T G Q`.
    pub fn congruent(&self, field: &Field, p: &[Vec<Elt>], q: &[Vec<Elt>]) -> GramForm {
        let n = self.n;
        let mut out = GramForm::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Elt::ZERO;
                for a in 0..n {
                    if p[a][i].is_zero() {
                        continue;
                    }
                    for b in 0..n {
                        let term = field.mul(field.mul(p[a][i], self.get(a, b)), q[b][j]);
                        acc = field.add(acc, term);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn rank(&self, field: &Field) -> usize {
        let mut scratch = self.entries.clone();
        linalg::rank_in_place(field, &mut scratch, self.n, self.n)
    }

    /// `{u : f(u, v) = 0 for all v}`, the left null space of the Gram matrix.
    pub fn left_radical(&self, field: &Field) -> Subspace {
        let cols = linalg::transpose(&self.rows(), self.n);
        Subspace { n: self.n, basis: linalg::null_space(field, &cols, self.n) }
    }

    /// `{w : f(v, w) = 0 for all v}`, the right null space of the Gram matrix.
    pub fn right_radical(&self, field: &Field) -> Subspace {
        Subspace { n: self.n, basis: linalg::null_space(field, &self.rows(), self.n) }
    }

    pub fn radical(&self, field: &Field, side: Side) -> Subspace {
        match side {
            Side::Left => self.left_radical(field),
            Side::Right => self.right_radical(field),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Skew with zero diagonal, which is `f(v, v) = 0` for all `v` in every
    /// characteristic.
    pub fn is_alternating(&self, field: &Field) -> bool {
        (0..self.n).all(|i| self.get(i, i).is_zero() && (0..i).all(|j| self.get(i, j) == field.neg(self.get(j, i))))
    }

    pub fn classify(&self, field: &Field) -> Classification {
        if self.is_alternating(field) {
            Classification::Alternating
        } else if self.is_symmetric() {
            Classification::SymmetricNotAlternating
        } else {
            Classification::General
        }
    }

    /// `u^T G w`.
    pub fn evaluate(&self, field: &Field, u: &[Elt], w: &[Elt]) -> Result<Elt, FormError> {
        for v in [u, w] {
            if v.len() != self.n {
                return Err(FormError::DimensionMismatch { expected: self.n, got: v.len() });
            }
        }
        Ok(self.eval_unchecked(field, u, w))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, field: &Field, u: &[Elt], w: &[Elt]) -> Elt {
        let mut acc = Elt::ZERO;
        for (i, &ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            let row = &self.entries[i * self.n..(i + 1) * self.n];
            let mut inner = Elt::ZERO;
            for (&g, &wj) in row.iter().zip(w) {
                inner = field.add(inner, field.mul(g, wj));
            }
            acc = field.add(acc, field.mul(ui, inner));
        }
        acc
    }

    /// The functional `v ↦ f(u, v)` (left) or `v ↦ f(v, u)` (right) as a row vector.
    pub fn functional(&self, field: &Field, u: &[Elt], side: Side) -> Vec<Elt> {
        let n = self.n;
        (0..n)
            .map(|j| {
                let mut acc = Elt::ZERO;
                for (i, &ui) in u.iter().enumerate() {
                    let g = match side {
                        Side::Left => self.get(i, j),
                        Side::Right => self.get(j, i),
                    };
                    acc = field.add(acc, field.mul(ui, g));
                }
                acc
            })
            .collect()
    }
}

/// A subspace of `K^n` stored by its reduced row-echelon basis, so two
/// subspaces are equal exactly when their representations are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<Elt>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Subspace {
        Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Subspace {
        let basis = (0..n).map(|i| (0..n).map(|j| if i == j { Elt::ONE } else { Elt::ZERO }).collect()).collect();
        Subspace { n, basis }
    }

    pub fn span(field: &Field, n: usize, vectors: &[Vec<Elt>]) -> Subspace {
        let mut basis = vectors.to_vec();
        linalg::rref(field, &mut basis, n);
        Subspace { n, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Elt>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, field: &Field, v: &[Elt]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        linalg::rank(field, &rows, self.n) == self.basis.len()
    }

    pub fn contains_subspace(&self, field: &Field, other: &Subspace) -> bool {
        self.sum(field, other).dim() == self.dim()
    }

    pub fn sum(&self, field: &Field, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(field, self.n, &rows)
    }

    pub fn intersection(&self, field: &Field, other: &Subspace) -> Subspace {
        // x = a·U = b·W  ⇔  (a, -b) in the left null space of [U; W]
        let (du, dw) = (self.dim(), other.dim());
        if du == 0 || dw == 0 {
            return Subspace::zero(self.n);
        }
        let mut stacked = self.basis.clone();
        stacked.extend(other.basis.iter().cloned());
        let cols = linalg::transpose(&stacked, self.n);
        let relations = linalg::null_space(field, &cols, du + dw);
        let vectors: Vec<Vec<Elt>> =
            relations.iter().map(|rel| linalg::combine(field, &rel[..du], &self.basis)).collect();
        Subspace::span(field, self.n, &vectors)
    }

    /// All `q^dim` points, in lexicographic order of basis coefficients.
    pub fn points<'a>(&'a self, field: &'a Field) -> impl Iterator<Item = Vec<Elt>> + 'a {
        linalg::vectors(field, self.dim()).map(move |c| {
            if self.basis.is_empty() {
                vec![Elt::ZERO; self.n]
            } else {
                linalg::combine(field, &c, &self.basis)
            }
        })
    }

    /// Number of points, `q^dim`.
    pub fn size(&self, field: &Field) -> u64 {
        (field.q() as u64).pow(self.dim() as u32)
    }
}
