use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_budget, FormSubspace, Kind, SpanError};
use crate::formcore::{linalg, GramForm, Side, Subspace};
use crate::gf::Elt;

/// `V(M)^L` or `V(M)^R` as a point set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VSet {
    pub points: Vec<Vec<Elt>>,
    pub span: Subspace,
    pub is_subspace: bool,
}

/// One class `A_i` of the partition of `I(M)^×`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropicClass {
    pub subspace: Subspace,
    pub dim: usize,
    /// The first `u` found with this `A_u`.
    pub representative: Vec<Elt>,
    /// Vectors `u ∈ I(M)^×` with `A_u` equal to this class.
    pub members: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropicSet {
    pub vectors: Vec<Vec<Elt>>,
    pub partition: Option<Vec<IsotropicClass>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadReport {
    pub radicals: Vec<Subspace>,
    pub t: usize,
    pub covers: bool,
    pub pairwise_trivial: bool,
}

impl FormSubspace {
    fn check_vector(&self, u: &[Elt]) -> Result<(), SpanError> {
        if u.len() != self.n {
            return Err(SpanError::VectorLength { expected: self.n, got: u.len() });
        }
        Ok(())
    }

    /// Coefficient vectors `c` with `u` in the `side` radical of `Σ c_i B_i`.
    pub fn kernel_coeffs(&self, u: &[Elt], side: Side) -> Vec<Vec<Elt>> {
        // column i of the system is the functional of B_i at u
        let functionals: Vec<Vec<Elt>> = self.basis.iter().map(|b| b.functional(&self.field, u, side)).collect();
        let rows = linalg::transpose(&functionals, self.n);
        if self.dim() == 0 {
            return Vec::new();
        }
        linalg::null_space(&self.field, &rows, self.dim())
    }

    /// `dim M_u`, by rank of the `n × d` evaluation system.
    pub fn kernel_dim(&self, u: &[Elt], side: Side) -> usize {
        let functionals: Vec<Vec<Elt>> = self.basis.iter().map(|b| b.functional(&self.field, u, side)).collect();
        self.dim() - linalg::rank(&self.field, &functionals, self.n)
    }

    /// `M_u^L = {f ∈ M : u ∈ rad_L f}` (or `M_u^R`).
    pub fn kernel_at(&self, u: &[Elt], side: Side) -> Result<FormSubspace, SpanError> {
        self.check_vector(u)?;
        Ok(self.subspace_from_coeffs(&self.kernel_coeffs(u, side)))
    }

    /// Points `v` with `M_v ≠ 0`, plus whether they form a subspace.
    pub fn v_set(&self, side: Side, budget: u64) -> Result<VSet, SpanError> {
        check_budget(self.q(), self.n, budget)?;
        let points: Vec<Vec<Elt>> =
            linalg::vectors(&self.field, self.n).filter(|v| self.kernel_dim(v, side) > 0).collect();
        let span = Subspace::span(&self.field, self.n, &points);
        let is_subspace = !points.is_empty() && span.size(&self.field) == points.len() as u64;
        Ok(VSet { points, span, is_subspace })
    }

    /// `A_u = {w : f(u, w) = 0 for all f ∈ M}`.
    pub fn annihilator(&self, u: &[Elt]) -> Result<Subspace, SpanError> {
        self.check_vector(u)?;
        let rows: Vec<Vec<Elt>> = self.basis.iter().map(|b| b.functional(&self.field, u, Side::Left)).collect();
        Ok(Subspace::span(&self.field, self.n, &linalg::null_space(&self.field, &rows, self.n)))
    }

    /// Whether every form of `M` vanishes on `U × U`.
    pub fn totally_isotropic(&self, u: &Subspace) -> bool {
        let field = &*self.field;
        self.basis
            .iter()
            .all(|f| u.basis().iter().all(|a| u.basis().iter().all(|b| f.eval_unchecked(field, a, b).is_zero())))
    }

    /// `I(M)^×`, with the classes `A_u` when `M` is constant rank, `dim M = n`
    /// and `q ≥ m + 1`.
    pub fn isotropic_set(&self, budget: u64) -> Result<IsotropicSet, SpanError> {
        self.require_symmetric_odd()?;
        check_budget(self.q(), self.n, budget)?;
        let vectors = self.isotropic_vectors();
        let partitioned = self.dim() == self.n && {
            let spectrum = self.rank_spectrum(budget)?;
            spectrum.constant_rank().is_some_and(|m| self.q() as usize > m)
        };
        let partition = partitioned.then(|| self.isotropic_classes(&vectors));
        Ok(IsotropicSet { vectors, partition })
    }

    pub(crate) fn require_symmetric_odd(&self) -> Result<(), SpanError> {
        if self.kind != Kind::Symmetric && !self.basis.iter().all(GramForm::is_symmetric) {
            return Err(SpanError::WrongKind(Kind::Symmetric));
        }
        if self.field.p() == 2 {
            return Err(SpanError::EvenCharacteristic);
        }
        Ok(())
    }

    /// Nonzero `w` with `f(w, w) = 0` for every basis form.
    pub fn isotropic_vectors(&self) -> Vec<Vec<Elt>> {
        let field = &*self.field;
        linalg::vectors(field, self.n)
            .skip(1)
            .filter(|w| self.basis.iter().all(|f| f.eval_unchecked(field, w, w).is_zero()))
            .collect()
    }

    /// Distinct subspaces `A_u` for `u` in `vectors`, in order of first appearance.
    pub fn isotropic_classes(&self, vectors: &[Vec<Elt>]) -> Vec<IsotropicClass> {
        let mut seen: BTreeMap<Subspace, usize> = BTreeMap::new();
        let mut classes: Vec<IsotropicClass> = Vec::new();
        for u in vectors {
            let a = self.annihilator(u).expect("vector length checked");
            match seen.get(&a) {
                Some(&i) => classes[i].members += 1,
                None => {
                    seen.insert(a.clone(), classes.len());
                    classes.push(IsotropicClass { dim: a.dim(), subspace: a, representative: u.clone(), members: 1 });
                }
            }
        }
        classes
    }

    /// Distinct radicals of `M^×` for a constant rank alternating `M`.
    pub fn radical_spread(&self, budget: u64) -> Result<SpreadReport, SpanError> {
        if self.kind != Kind::Alternating {
            return Err(SpanError::WrongKind(Kind::Alternating));
        }
        let spectrum = self.rank_spectrum(budget)?;
        if spectrum.constant_rank().is_none() {
            return Err(SpanError::NotConstantRank(spectrum.ranks()));
        }
        check_budget(self.q(), self.n, budget)?;
        let radicals = self.distinct_radicals(Side::Right, budget)?;
        Ok(self.spread_of(radicals))
    }

    /// Distinct `side` radicals over `M^×`, sorted.
    pub fn distinct_radicals(&self, side: Side, budget: u64) -> Result<Vec<Subspace>, SpanError> {
        Ok(self.radical_representatives(side, budget)?.into_keys().collect())
    }

    /// Each distinct `side` radical of `M^×` with the coefficient vector of
    /// the lexicographically first element having it.
    pub fn radical_representatives(&self, side: Side, budget: u64) -> Result<BTreeMap<Subspace, Vec<Elt>>, SpanError> {
        let n = self.n;
        let field = &*self.field;
        self.fold_nonzero(
            budget,
            true,
            BTreeMap::new,
            |acc, coeffs, entries| {
                let g = GramForm::from_flat(n, entries.to_vec());
                acc.entry(g.radical(field, side)).or_insert_with(|| coeffs.to_vec());
            },
            |mut a, b| {
                for (k, v) in b {
                    a.entry(k).or_insert(v);
                }
                a
            },
        )
    }

    /// Covering and disjointness of a family of subspaces of `V`.
    pub fn spread_of(&self, radicals: Vec<Subspace>) -> SpreadReport {
        let q = self.q() as u64;
        let mut hit = vec![false; q.pow(self.n as u32) as usize];
        let mut incidences = 0u64;
        for r in &radicals {
            for p in r.points(&self.field).skip(1) {
                incidences += 1;
                hit[linalg::vector_to_index(q, &p) as usize] = true;
            }
        }
        let covered = hit.iter().skip(1).filter(|&&h| h).count() as u64;
        SpreadReport {
            t: radicals.len(),
            covers: covered == q.pow(self.n as u32) - 1,
            pairwise_trivial: covered == incidences,
            radicals,
        }
    }
}
