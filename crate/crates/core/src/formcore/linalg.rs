//! Row reduction over a finite field.

use crate::gf::{Elt, Field};

/// Reduces `rows` (each of length `cols`) to reduced row-echelon form in place:
/// pivots are one, pivot columns are cleared, zero rows are dropped.
/// Returns the pivot column of each remaining row.
pub fn rref(field: &Field, rows: &mut Vec<Vec<Elt>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        let inv = field.inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c];
            for (x, &pr) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = field.sub(*x, field.mul(factor, pr));
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Rank of a row-major `rows × cols` matrix; `data` is used as scratch.
pub fn rank_in_place(field: &Field, data: &mut [Elt], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(found) = (rank..rows).find(|&i| !data[i * cols + c].is_zero()) else {
            continue;
        };
        if found != rank {
            for j in c..cols {
                data.swap(found * cols + j, rank * cols + j);
            }
        }
        let inv = field.inv(data[rank * cols + c]);
        for i in rank + 1..rows {
            let v = data[i * cols + c];
            if v.is_zero() {
                continue;
            }
            let factor = field.mul(v, inv);
            for j in c..cols {
                let pr = data[rank * cols + j];
                data[i * cols + j] = field.sub(data[i * cols + j], field.mul(factor, pr));
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank(field: &Field, rows: &[Vec<Elt>], cols: usize) -> usize {
    let mut flat: Vec<Elt> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    rank_in_place(field, &mut flat, rows.len(), cols)
}

/// Basis of `{x : A x = 0}` for `A` given by `rows`, in canonical RREF.
pub fn null_space(field: &Field, rows: &[Vec<Elt>], cols: usize) -> Vec<Vec<Elt>> {
    let mut reduced = rows.to_vec();
    let pivots = rref(field, &mut reduced, cols);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Elt::ZERO; cols];
        v[free] = Elt::ONE;
        for (row, &pc) in reduced.iter().zip(&pivots) {
            v[pc] = field.neg(row[free]);
        }
        basis.push(v);
    }
    rref(field, &mut basis, cols);
    basis
}

pub fn transpose(rows: &[Vec<Elt>], cols: usize) -> Vec<Vec<Elt>> {
    (0..cols).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}

/// `coeffs · rows`, a linear combination of equal-length rows.
pub fn combine(field: &Field, coeffs: &[Elt], rows: &[Vec<Elt>]) -> Vec<Elt> {
    let len = rows.first().map_or(0, Vec::len);
    let mut out = vec![Elt::ZERO; len];
    for (&c, row) in coeffs.iter().zip(rows) {
        if c.is_zero() {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(row) {
            *o = field.add(*o, field.mul(c, x));
        }
    }
    out
}

/// All vectors of `field^n` in lexicographic order of codes, first coordinate
/// most significant.
pub fn vectors(field: &Field, n: usize) -> impl Iterator<Item = Vec<Elt>> + '_ {
    let q = field.q() as u64;
    let total = q.pow(n as u32);
    (0..total).map(move |idx| index_to_vector(q, n, idx))
}

pub fn index_to_vector(q: u64, n: usize, mut idx: u64) -> Vec<Elt> {
    let mut v = vec![Elt::ZERO; n];
    for slot in v.iter_mut().rev() {
        *slot = Elt((idx % q) as u32);
        idx /= q;
    }
    v
}

pub fn vector_to_index(q: u64, v: &[Elt]) -> u64 {
    v.iter().fold(0u64, |acc, e| acc * q + e.0 as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_gf3_example() {
        let f = Field::of_order(3).unwrap();
        let a = vec![vec![Elt(0), Elt(1), Elt(0)], vec![Elt(2), Elt(0), Elt(0)], vec![Elt(0), Elt(0), Elt(0)]];
        assert_eq!(rank(&f, &a, 3), 2);
        assert_eq!(null_space(&f, &a, 3), vec![vec![Elt(0), Elt(0), Elt(1)]]);
    }

    #[test]
    fn rref_is_canonical() {
        let f = Field::of_order(5).unwrap();
        let mut a = vec![vec![Elt(1), Elt(0), Elt(2)], vec![Elt(0), Elt(1), Elt(3)]];
        // a0 + a1 and 2 a0 + 3 a1
        let mut b = vec![vec![Elt(1), Elt(1), Elt(0)], vec![Elt(2), Elt(3), Elt(3)]];
        assert_eq!(rref(&f, &mut a, 3), rref(&f, &mut b, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn vector_indexing_round_trips() {
        for idx in 0..81 {
            assert_eq!(vector_to_index(3, &index_to_vector(3, 4, idx)), idx);
        }
    }
}
