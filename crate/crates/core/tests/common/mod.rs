//! Brute-force oracles for the integration tests. Field arithmetic is rebuilt
//! here from the modulus by schoolbook polynomial multiplication; nothing
//! below uses the crate's tables or linear algebra.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use bilrank::gf::Field;
use bilrank::spanspace::FormSubspace;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Every `*.sub` file in `fixtures/<dir>`, sorted.
pub fn fixture_files(dir: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(fixtures().join(dir))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "sub"))
        .collect();
    out.sort();
    out
}

/// `GF(p^k)` with codes `Σ c_i p^i`, arithmetic by full tables.
pub struct Gf {
    pub p: u32,
    pub q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl Gf {
    pub fn from_modulus(p: u32, k: u32, modulus: &[u32]) -> Gf {
        assert_eq!(modulus.len(), k as usize + 1);
        assert_eq!(modulus[k as usize], 1);
        let q = p.pow(k);
        let digits = |c: u32| -> Vec<u32> { (0..k).map(|i| c / p.pow(i) % p).collect() };
        let code = |d: &[u32]| -> u32 { d.iter().enumerate().map(|(i, &x)| x * p.pow(i as u32)).sum() };
        let mut add = vec![0; (q * q) as usize];
        let mut mul = vec![0; (q * q) as usize];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = code(&sum);
                let mut prod = vec![0u32; 2 * k as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for deg in (k as usize..2 * k as usize).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    for (i, &mc) in modulus.iter().enumerate() {
                        let pos = deg - k as usize + i;
                        prod[pos] = (prod[pos] + (p - c) * mc % p) % p;
                    }
                }
                mul[(a * q + b) as usize] = code(&prod[..k as usize]);
            }
        }
        let neg = (0..q).map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap()).collect();
        let inv = (0..q)
            .map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap() })
            .collect();
        Gf { p, q, add, mul, neg, inv }
    }

    pub fn of(field: &Field) -> Gf {
        let spec = field.spec();
        Gf::from_modulus(spec.p, spec.k, &spec.modulus)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0);
        self.inv[a as usize]
    }

    /// Every vector of length `n`, first coordinate most significant.
    pub fn vectors(&self, n: usize) -> Vec<Vec<u32>> {
        let total = (self.q as u64).pow(n as u32);
        (0..total)
            .map(|mut idx| {
                let mut v = vec![0; n];
                for slot in v.iter_mut().rev() {
                    *slot = (idx % self.q as u64) as u32;
                    idx /= self.q as u64;
                }
                v
            })
            .collect()
    }

    /// Rank by plain Gaussian elimination.
    pub fn rank(&self, rows: &[Vec<u32>]) -> usize {
        let mut m: Vec<Vec<u32>> = rows.to_vec();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, p);
            let inv = self.inv(m[rank][c]);
            for r in 0..m.len() {
                if r != rank && m[r][c] != 0 {
                    let factor = self.neg(self.mul(m[r][c], inv));
                    for j in 0..cols {
                        let x = self.mul(factor, m[rank][j]);
                        m[r][j] = self.add(m[r][j], x);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// `u^T F w` for a row-major `n × n` matrix.
    pub fn eval(&self, f: &[u32], n: usize, u: &[u32], w: &[u32]) -> u32 {
        let mut acc = 0;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc = self.add(acc, self.mul(u[i], self.mul(f[i * n + j], w[j])));
            }
        }
        acc
    }

    /// `u^T F`.
    pub fn left(&self, f: &[u32], n: usize, u: &[u32]) -> Vec<u32> {
        (0..n).map(|j| (0..n).fold(0, |acc, i| self.add(acc, self.mul(u[i], f[i * n + j])))).collect()
    }

    /// `F w`.
    pub fn right(&self, f: &[u32], n: usize, w: &[u32]) -> Vec<u32> {
        (0..n).map(|i| (0..n).fold(0, |acc, j| self.add(acc, self.mul(f[i * n + j], w[j])))).collect()
    }
}

/// Row-major matrices of codes.
pub fn rows_of(f: &[u32], n: usize) -> Vec<Vec<u32>> {
    f.chunks(n).map(<[u32]>::to_vec).collect()
}

pub fn transpose(f: &[u32], n: usize) -> Vec<u32> {
    (0..n * n).map(|idx| f[(idx % n) * n + idx / n]).collect()
}

/// A subspace as the explicit list of all its elements.
pub struct Enumerated {
    pub gf: Gf,
    pub n: usize,
    pub d: usize,
    pub basis: Vec<Vec<u32>>,
    /// All `q^d` elements; index 0 is the zero form.
    pub elements: Vec<Vec<u32>>,
    pub ranks: Vec<usize>,
}

impl Enumerated {
    pub fn new(m: &FormSubspace) -> Enumerated {
        let gf = Gf::of(m.field());
        let n = m.n();
        let basis: Vec<Vec<u32>> = m.basis().iter().map(|f| f.entries().iter().map(|e| e.0).collect()).collect();
        Enumerated::from_basis(gf, n, basis)
    }

    pub fn from_basis(gf: Gf, n: usize, basis: Vec<Vec<u32>>) -> Enumerated {
        let d = basis.len();
        let elements: Vec<Vec<u32>> = gf
            .vectors(d)
            .iter()
            .map(|c| {
                let mut f = vec![0; n * n];
                for (ci, b) in c.iter().zip(&basis) {
                    if *ci != 0 {
                        for (x, y) in f.iter_mut().zip(b) {
                            *x = gf.add(*x, gf.mul(*ci, *y));
                        }
                    }
                }
                f
            })
            .collect();
        let ranks = elements.iter().map(|f| gf.rank(&rows_of(f, n))).collect();
        Enumerated { gf, n, d, basis, elements, ranks }
    }

    pub fn q(&self) -> u64 {
        self.gf.q as u64
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (usize, &Vec<u32>)> {
        self.elements.iter().enumerate().skip(1)
    }

    /// Sorted distinct ranks of nonzero elements.
    pub fn spectrum(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.ranks[1..].to_vec();
        s.sort();
        s.dedup();
        s
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    /// Indices of elements whose left (or right) radical contains `u`.
    pub fn kernel(&self, u: &[u32], left: bool) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&i| {
                let f = &self.elements[i];
                let image = if left { self.gf.left(f, self.n, u) } else { self.gf.right(f, self.n, u) };
                image.iter().all(|&x| x == 0)
            })
            .collect()
    }

    /// Enumerated left or right radical of element `i`.
    pub fn radical(&self, i: usize, left: bool) -> Vec<Vec<u32>> {
        let f = &self.elements[i];
        self.gf
            .vectors(self.n)
            .into_iter()
            .filter(|u| {
                let image = if left { self.gf.left(f, self.n, u) } else { self.gf.right(f, self.n, u) };
                image.iter().all(|&x| x == 0)
            })
            .collect()
    }

    /// Whether elements `a` and `b` have the same right (or left) radical. The
    /// right radical is the annihilator of the row space, so compare row spaces
    /// by rank; columns for the left radical.
    pub fn same_radical(&self, a: usize, b: usize, right: bool) -> bool {
        let lines = |i: usize| {
            let f = &self.elements[i];
            if right {
                rows_of(f, self.n)
            } else {
                rows_of(&transpose(f, self.n), self.n)
            }
        };
        let (ra, rb) = (lines(a), lines(b));
        let both: Vec<Vec<u32>> = ra.iter().chain(&rb).cloned().collect();
        let r = self.gf.rank(&both);
        r == self.ranks[a] && r == self.ranks[b]
    }
}

/// `log_q` of an exact power.
pub fn log_q(q: u64, mut size: u64) -> usize {
    let mut d = 0;
    while size > 1 {
        assert_eq!(size % q, 0, "{size} is not a power of {q}");
        size /= q;
        d += 1;
    }
    d
}
