//! Witt index and isotropic-vector counts of symmetric forms in odd
//! characteristic.

use serde::{Deserialize, Serialize};

use super::{linalg, FormError, GramForm};
use crate::gf::{Elt, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittCensus {
    pub rank: usize,
    pub witt_index: usize,
    pub isotropic_nonzero_count: u64,
}

/// Nonzero diagonal entries of a congruent diagonal form.
fn diagonalize(field: &Field, f: &GramForm) -> Vec<Elt> {
    let n = f.n();
    let mut g: Vec<Vec<Elt>> = f.rows();
    let mut diag = Vec::new();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = match active.iter().position(|&i| !g[i][i].is_zero()) {
            Some(p) => p,
            None => {
                let pair = active
                    .iter()
                    .enumerate()
                    .find_map(|(a, &i)| active.iter().find(|&&j| j != i && !g[i][j].is_zero()).map(|&j| (a, j)));
                let Some((a, j)) = pair else { break };
                // e_i ← e_i + e_j, so g_ii becomes 2 g_ij ≠ 0
                let i = active[a];
                for c in 0..n {
                    g[i][c] = field.add(g[i][c], g[j][c]);
                }
                for row in g.iter_mut() {
                    row[i] = field.add(row[i], row[j]);
                }
                a
            }
        };
        let i = active.swap_remove(pivot);
        let d = g[i][i];
        let d_inv = field.inv(d);
        for &j in &active {
            let factor = field.mul(g[j][i], d_inv);
            if factor.is_zero() {
                continue;
            }
            for c in 0..n {
                let t = field.mul(factor, g[i][c]);
                g[j][c] = field.sub(g[j][c], t);
            }
            for row in g.iter_mut() {
                let t = field.mul(factor, row[i]);
                row[j] = field.sub(row[j], t);
            }
        }
        diag.push(d);
    }
    diag
}

/// Number of `v ∈ K^r` with `Q(v) = 0` for a nondegenerate quadratic form of
/// rank `r`; `hyperbolic` matters only for even `r`.
fn nondegenerate_zeros(q: u128, r: usize, hyperbolic: bool) -> u128 {
    if r == 0 {
        return 1;
    }
    let base = q.pow(r as u32 - 1);
    if r % 2 == 1 {
        return base;
    }
    let half = q.pow(r as u32 / 2) - q.pow(r as u32 / 2 - 1);
    if hyperbolic {
        base + half
    } else {
        base - half
    }
}

pub fn witt_census(field: &Field, f: &GramForm) -> Result<WittCensus, FormError> {
    if field.p() == 2 {
        return Err(FormError::EvenCharacteristic(field.p()));
    }
    if !f.is_symmetric() {
        return Err(FormError::NotSymmetric);
    }
    let diag = diagonalize(field, f);
    let r = diag.len();
    let disc = diag.iter().fold(Elt::ONE, |acc, &d| field.mul(acc, d));
    let (witt_index, hyperbolic) = if r % 2 == 1 {
        ((r - 1) / 2, false)
    } else {
        let sign = if (r / 2) % 2 == 1 { field.neg(Elt::ONE) } else { Elt::ONE };
        if field.is_square(field.mul(sign, disc)) {
            (r / 2, true)
        } else {
            (r / 2 - 1, false)
        }
    };
    let q = field.q() as u128;
    let total = q.pow((f.n() - r) as u32) * nondegenerate_zeros(q, r, hyperbolic) - 1;
    Ok(WittCensus {
        rank: r,
        witt_index,
        isotropic_nonzero_count: u64::try_from(total).expect("isotropic count fits in u64"),
    })
}

/// `|{v ≠ 0 : f(v, v) = 0}|` by scanning all of `K^n`.
pub fn isotropic_count_enumerated(field: &Field, f: &GramForm) -> u64 {
    linalg::vectors(field, f.n()).skip(1).filter(|v| f.eval_unchecked(field, v, v).is_zero()).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_examples() {
        let f3 = Field::of_order(3).unwrap();
        let zero = GramForm::zero(2);
        assert_eq!(witt_census(&f3, &zero).unwrap(), WittCensus { rank: 0, witt_index: 0, isotropic_nonzero_count: 8 });
        let hyp = GramForm::from_codes(&f3, &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(witt_census(&f3, &hyp).unwrap(), WittCensus { rank: 2, witt_index: 1, isotropic_nonzero_count: 4 });
        let ell = GramForm::identity(2);
        assert_eq!(witt_census(&f3, &ell).unwrap(), WittCensus { rank: 2, witt_index: 0, isotropic_nonzero_count: 0 });
        for g in [&zero, &hyp, &ell] {
            assert_eq!(witt_census(&f3, g).unwrap().isotropic_nonzero_count, isotropic_count_enumerated(&f3, g));
        }
    }

    #[test]
    fn census_rejects_bad_input() {
        let f3 = Field::of_order(3).unwrap();
        let g = GramForm::from_codes(&f3, &[&[0, 1], &[0, 0]]).unwrap();
        assert_eq!(witt_census(&f3, &g), Err(FormError::NotSymmetric));
        let f4 = Field::of_order(4).unwrap();
        assert_eq!(witt_census(&f4, &GramForm::identity(2)), Err(FormError::EvenCharacteristic(2)));
    }

    #[test]
    fn census_matches_enumeration_on_all_gf3_ternary_forms() {
        let f3 = Field::of_order(3).unwrap();
        for idx in 0..3u64.pow(6) {
            let c = linalg::index_to_vector(3, 6, idx);
            let rows = vec![vec![c[0], c[1], c[2]], vec![c[1], c[3], c[4]], vec![c[2], c[4], c[5]]];
            let g = GramForm::from_rows(3, &rows).unwrap();
            let census = witt_census(&f3, &g).unwrap();
            assert_eq!(census.rank, g.rank(&f3));
            assert_eq!(census.isotropic_nonzero_count, isotropic_count_enumerated(&f3, &g), "{rows:?}");
        }
    }
}
