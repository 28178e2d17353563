use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FormSubspace, Kind, SpanError};
use crate::formcore::{linalg, GramForm};
use crate::gf::{Elt, Field};

/// Draws `d` independent vectors of `K^len` by rejection: uniform over
/// ordered bases, hence uniform over `d`-dimensional subspaces.
fn random_independent(field: &Field, len: usize, d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Elt>> {
    let q = field.q();
    let mut rows: Vec<Vec<Elt>> = Vec::with_capacity(d);
    while rows.len() < d {
        let v: Vec<Elt> = (0..len).map(|_| Elt(rng.gen_range(0..q))).collect();
        rows.push(v);
        if linalg::rank(field, &rows, len) < rows.len() {
            rows.pop();
        }
    }
    rows
}

/// A uniformly random `d`-dimensional subspace of the `kind` space on `K^n`.
pub fn random_subspace(
    field: Arc<Field>,
    n: usize,
    d: usize,
    kind: Kind,
    seed: u64,
) -> Result<FormSubspace, SpanError> {
    FormSubspace::full(field, n, kind).random_subspace_of(d, seed)
}

/// A uniformly random `d`-dimensional subspace of `m`.
pub fn random_subspace_of(m: &FormSubspace, d: usize, seed: u64) -> Result<FormSubspace, SpanError> {
    m.random_subspace_of(d, seed)
}

impl FormSubspace {
    pub fn random_subspace_of(&self, d: usize, seed: u64) -> Result<FormSubspace, SpanError> {
        if d > self.dim() {
            return Err(SpanError::DimensionTooLarge { d, max: self.dim() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = random_independent(&self.field, self.dim(), d, &mut rng);
        let forms: Vec<GramForm> = coeffs.iter().map(|c| self.form(c)).collect();
        let m = FormSubspace::span(self.field.clone(), self.n, &forms)?;
        Ok(FormSubspace { kind: self.kind, ..m })
    }

    /// A uniformly random element of `M`.
    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> GramForm {
        let q = self.q();
        let c: Vec<Elt> = (0..self.dim()).map(|_| Elt(rng.gen_range(0..q))).collect();
        self.form(&c)
    }
}
