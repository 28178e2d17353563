//! Arithmetic in small finite fields GF(p^k).
//!
//! An element is an integer code: the residue polynomial
//! `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` modulo the field's modulus is stored
//! as `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`. Code 0 is zero and code 1 is one,
//! so the prime subfield occupies codes `0..p`.
//!
//! Multiplication always goes through log/antilog tables. Addition is XOR in
//! characteristic 2, plain modular addition for prime fields, a full table for
//! fields of order at most [`ADD_TABLE_LIMIT`], and Zech logarithms above that.
//!
//! Canonical moduli are Conway polynomials, computed on demand and cached, so
//! `Field::canonical(p, k)` always produces the same encoding.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Fields up to this order get a full addition table.
pub const ADD_TABLE_LIMIT: u32 = 1024;

const NO_LOG: u32 = u32::MAX;

/// A field element, identified by its integer code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elt(pub u32);

impl Elt {
    pub const ZERO: Elt = Elt(0);
    pub const ONE: Elt = Elt(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the limit of 2^16")]
    TooLarge { p: u32, k: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("modulus {modulus:?} is not monic of degree {k} with coefficients below {p}")]
    MalformedModulus { p: u32, k: u32, modulus: Vec<u32> },
    #[error("modulus {modulus:?} is reducible over GF({p})")]
    Reducible { p: u32, modulus: Vec<u32> },
    #[error("element code {code} is out of range for GF({q})")]
    OutOfRange { code: u32, q: u32 },
    #[error("GF({top}) is not an extension of GF({base})")]
    NotExtension { base: u32, top: u32 },
}

/// Characteristic, degree and modulus of a field. The modulus is monic of
/// degree `k`, coefficients ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    /// The field with the canonical (Conway) modulus.
    pub fn canonical(p: u32, k: u32) -> Result<FieldSpec, GfError> {
        check_size(p, k)?;
        Ok(FieldSpec { p, k, modulus: conway_polynomial(p, k)? })
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }

    /// Checks every invariant, including irreducibility of the modulus.
    pub fn validate(&self) -> Result<(), GfError> {
        check_size(self.p, self.k)?;
        let malformed = || GfError::MalformedModulus { p: self.p, k: self.k, modulus: self.modulus.clone() };
        if self.modulus.len() != self.k as usize + 1
            || self.modulus.last() != Some(&1)
            || self.modulus.iter().any(|&c| c >= self.p)
        {
            return Err(malformed());
        }
        if !poly::is_irreducible(&self.modulus, self.p) {
            return Err(GfError::Reducible { p: self.p, modulus: self.modulus.clone() });
        }
        Ok(())
    }
}

fn check_size(p: u32, k: u32) -> Result<(), GfError> {
    if !is_prime(p as u64) {
        return Err(GfError::NotPrime(p));
    }
    if k == 0 {
        return Err(GfError::ZeroDegree);
    }
    match (p as u64).checked_pow(k) {
        Some(q) if q <= MAX_ORDER => Ok(()),
        _ => Err(GfError::TooLarge { p, k }),
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q` into `(p, k)` with `q = p^k`.
pub fn split_prime_power(q: u64) -> Result<(u32, u32), GfError> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return Err(GfError::NotPrimePower(q));
    }
    let p = factors[0];
    let mut k = 0;
    let mut rest = q;
    while rest > 1 {
        rest /= p;
        k += 1;
    }
    Ok((p as u32, k))
}

/// Dense polynomial arithmetic over GF(p), coefficients ascending.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    /// Remainder of `a` modulo `f` (any nonzero `f`).
    pub fn rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let mut f = f.to_vec();
        trim(&mut f);
        let df = f.len() - 1;
        let lead_inv = inv_mod(f[df], p) as u64;
        while r.len() > df {
            let top = r.len() - 1;
            let c = r[top] as u64 * lead_inv % p as u64;
            let shift = top - df;
            for (i, &fi) in f.iter().enumerate() {
                let sub = c * fi as u64 % p as u64;
                r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        rem(&prod, f, p)
    }

    pub fn pow_mod(base: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &b, f, p);
            }
            e >>= 1;
            if e > 0 {
                b = mul_mod(&b, &b, f, p);
            }
        }
        rem(&result, f, p)
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0);
                let y = *b.get(i).unwrap_or(&0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let k = f.len() - 1;
        if k == 0 {
            return false;
        }
        let x = vec![0, 1];
        // x^(p^j) mod f for j = 0..=k
        let mut frob = vec![rem(&x, f, p)];
        for _ in 0..k {
            let last = frob.last().unwrap();
            frob.push(pow_mod(last, p as u64, f, p));
        }
        if sub(&frob[k], &rem(&x, f, p), p) != Vec::<u32>::new() {
            return false;
        }
        for l in super::prime_factors(k as u64) {
            let j = k / l as usize;
            let g = gcd(&sub(&frob[j], &x, p), f, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

fn code_to_digits(code: u32, p: u32, k: u32) -> Vec<u32> {
    let mut digits = Vec::with_capacity(k as usize);
    let mut c = code;
    for _ in 0..k {
        digits.push(c % p);
        c /= p;
    }
    poly::trim(&mut digits);
    digits
}

fn digits_to_code(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

/// True when `x` has multiplicative order exactly `q - 1` modulo `f`.
fn x_has_full_order(f: &[u32], p: u32, q: u64) -> bool {
    let x = vec![0, 1];
    if poly::pow_mod(&x, q - 1, f, p) != vec![1] {
        return false;
    }
    prime_factors(q - 1).into_iter().all(|l| poly::pow_mod(&x, (q - 1) / l, f, p) != vec![1])
}

fn conway_cache() -> &'static Mutex<HashMap<(u32, u32), Vec<u32>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Vec<u32>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The Conway polynomial of degree `k` over GF(p), ascending coefficients.
///
/// Candidates `x^k - a_{k-1} x^{k-1} + a_{k-2} x^{k-2} - ...` are scanned in
/// lexicographic order of `(a_{k-1}, ..., a_0)`; the first one that is
/// primitive and compatible with the Conway polynomials of every proper
/// subfield is returned.
pub fn conway_polynomial(p: u32, k: u32) -> Result<Vec<u32>, GfError> {
    check_size(p, k)?;
    if let Some(found) = conway_cache().lock().unwrap().get(&(p, k)) {
        return Ok(found.clone());
    }
    let q = (p as u64).pow(k);
    let subfields: Vec<(u32, Vec<u32>)> = (1..k)
        .filter(|d| k.is_multiple_of(*d))
        .map(|d| conway_polynomial(p, d).map(|c| (d, c)))
        .collect::<Result<_, _>>()?;

    let mut word = vec![0u32; k as usize]; // word[0] = a_{k-1}
    let found = loop {
        let mut f = vec![0u32; k as usize + 1];
        f[k as usize] = 1;
        for (pos, &a) in word.iter().enumerate() {
            let i = k as usize - 1 - pos;
            let sign_negative = (k as usize - i) % 2 == 1;
            f[i] = if sign_negative { (p - a) % p } else { a };
        }
        if f[0] != 0 && x_has_full_order(&f, p, q) && compatible(&f, p, q, &subfields) {
            break f;
        }
        // advance the word, last position fastest
        let mut idx = word.len();
        loop {
            if idx == 0 {
                unreachable!("a primitive polynomial of every degree exists");
            }
            idx -= 1;
            word[idx] += 1;
            if word[idx] < p {
                break;
            }
            word[idx] = 0;
        }
    };
    conway_cache().lock().unwrap().insert((p, k), found.clone());
    Ok(found)
}

fn compatible(f: &[u32], p: u32, q: u64, subfields: &[(u32, Vec<u32>)]) -> bool {
    subfields.iter().all(|(d, sub)| {
        let e = (q - 1) / ((p as u64).pow(*d) - 1);
        let beta = poly::pow_mod(&[0, 1], e, f, p);
        // Horner evaluation of sub at beta
        let mut acc: Vec<u32> = Vec::new();
        for &c in sub.iter().rev() {
            acc = poly::mul_mod(&acc, &beta, f, p);
            let mut with_c = acc.clone();
            if with_c.is_empty() {
                with_c.push(0);
            }
            with_c[0] = (with_c[0] + c) % p;
            poly::trim(&mut with_c);
            acc = with_c;
        }
        acc.is_empty()
    })
}

#[derive(Clone)]
enum Adder {
    Xor,
    Prime,
    Table(Vec<u16>),
    Zech(Vec<u32>),
}

/// An immutable finite field with precomputed tables.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    q: u32,
    generator: Elt,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    adder: Adder,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.spec.p)
            .field("k", &self.spec.k)
            .field("modulus", &self.spec.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

fn field_cache() -> &'static Mutex<HashMap<(u32, u32), Arc<Field>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Field>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Field, GfError> {
        spec.validate()?;
        let p = spec.p;
        let k = spec.k;
        let q = spec.order() as u32;
        let f = spec.modulus.clone();

        let add_slow = |a: u32, b: u32| -> u32 {
            let (mut a, mut b) = (a, b);
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..k {
                out += ((a % p + b % p) % p) * place;
                a /= p;
                b /= p;
                place = place.wrapping_mul(p);
            }
            out
        };

        // generator: x itself when primitive, otherwise the smallest primitive code
        let gen_digits = if x_has_full_order(&f, p, q as u64) {
            poly::rem(&[0, 1], &f, p)
        } else {
            let factors = prime_factors(q as u64 - 1);
            (2..q)
                .map(|c| code_to_digits(c, p, k))
                .find(|g| factors.iter().all(|&l| poly::pow_mod(g, (q as u64 - 1) / l, &f, p) != vec![1]))
                .unwrap_or_else(|| vec![1])
        };
        let generator = Elt(digits_to_code(&gen_digits, p));

        let order = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * order.max(1)];
        let mut log = vec![NO_LOG; q as usize];
        let mut cur = vec![1u32];
        for i in 0..order {
            let code = digits_to_code(&cur, p);
            exp[i] = code;
            log[code as usize] = i as u32;
            cur = poly::mul_mod(&cur, &gen_digits, &f, p);
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }

        let neg = (0..q)
            .map(|a| {
                let digits = code_to_digits(a, p, k);
                let negd: Vec<u32> = digits.iter().map(|&d| (p - d) % p).collect();
                digits_to_code(&negd, p)
            })
            .collect();

        let adder = if p == 2 {
            Adder::Xor
        } else if k == 1 {
            Adder::Prime
        } else if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = add_slow(a, b) as u16;
                }
            }
            Adder::Table(table)
        } else {
            let zech = (0..order)
                .map(|d| {
                    let s = add_slow(1, exp[d]);
                    if s == 0 {
                        NO_LOG
                    } else {
                        log[s as usize]
                    }
                })
                .collect();
            Adder::Zech(zech)
        };

        Ok(Field { spec, q, generator, exp, log, neg, adder })
    }

    /// The field GF(p^k) with its Conway modulus, shared from a process-wide cache.
    pub fn canonical(p: u32, k: u32) -> Result<Arc<Field>, GfError> {
        if let Some(found) = field_cache().lock().unwrap().get(&(p, k)) {
            return Ok(found.clone());
        }
        let field = Arc::new(Field::new(FieldSpec::canonical(p, k)?)?);
        field_cache().lock().unwrap().insert((p, k), field.clone());
        Ok(field)
    }

    /// The canonical field of order `q`.
    pub fn of_order(q: u64) -> Result<Arc<Field>, GfError> {
        let (p, k) = split_prime_power(q)?;
        Field::canonical(p, k)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.spec.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.spec.k
    }

    /// A primitive element; the residue of `x` for Conway moduli.
    pub fn generator(&self) -> Elt {
        self.generator
    }

    pub fn elt(&self, code: u32) -> Result<Elt, GfError> {
        if code < self.q {
            Ok(Elt(code))
        } else {
            Err(GfError::OutOfRange { code, q: self.q })
        }
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elt {
        Elt(n.rem_euclid(self.spec.p as i64) as u32)
    }

    /// All elements in ascending code order.
    pub fn elements(&self) -> impl Iterator<Item = Elt> + '_ {
        (0..self.q).map(Elt)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elt> + '_ {
        (1..self.q).map(Elt)
    }

    #[inline]
    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        match &self.adder {
            Adder::Xor => Elt(a.0 ^ b.0),
            Adder::Prime => {
                let s = a.0 + b.0;
                Elt(if s >= self.q { s - self.q } else { s })
            }
            Adder::Table(t) => Elt(t[(a.0 * self.q + b.0) as usize] as u32),
            Adder::Zech(z) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let order = self.q - 1;
                let (i, j) = (self.log[a.0 as usize], self.log[b.0 as usize]);
                let d = if j >= i { j - i } else { j + order - i };
                let zd = z[d as usize];
                if zd == NO_LOG {
                    Elt::ZERO
                } else {
                    Elt(self.exp[(i + zd) as usize])
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Elt) -> Elt {
        Elt(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        if a.0 == 0 || b.0 == 0 {
            return Elt::ZERO;
        }
        Elt(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn checked_inv(&self, a: Elt) -> Option<Elt> {
        if a.0 == 0 {
            return None;
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Some(Elt(self.exp[((order - l) % order) as usize]))
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Elt) -> Elt {
        self.checked_inv(a).expect("inverse of zero")
    }

    #[inline]
    pub fn div(&self, a: Elt, b: Elt) -> Elt {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elt, e: u64) -> Elt {
        if e == 0 {
            return Elt::ONE;
        }
        if a.0 == 0 {
            return Elt::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Elt(self.exp[((l * (e % order)) % order) as usize])
    }

    /// Discrete log base [`Field::generator`]; `None` for zero.
    pub fn log(&self, a: Elt) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    /// Nonzero squares in odd characteristic (zero counts as a square).
    pub fn is_square(&self, a: Elt) -> bool {
        match self.log(a) {
            None => true,
            Some(l) => self.spec.p == 2 || l % 2 == 0,
        }
    }

    pub fn sum<I: IntoIterator<Item = Elt>>(&self, items: I) -> Elt {
        items.into_iter().fold(Elt::ZERO, |acc, x| self.add(acc, x))
    }
}

/// A field extension `base ⊂ top` with an explicit embedding, trace map and
/// power basis of `top` over `base`.
#[derive(Clone, Debug)]
pub struct Tower {
    base: Arc<Field>,
    top: Arc<Field>,
    degree: u32,
    embed: Vec<Elt>,
    unembed: Vec<u32>,
    basis: Vec<Elt>,
    coords: Vec<Elt>,
}

impl Tower {
    pub fn new(base: Arc<Field>, top: Arc<Field>) -> Result<Tower, GfError> {
        if base.p() != top.p() || !top.k().is_multiple_of(base.k()) {
            return Err(GfError::NotExtension { base: base.q(), top: top.q() });
        }
        let degree = top.k() / base.k();
        let p = base.p();

        // image of the base field's x: a root of the base modulus inside top
        let is_root = |g: Elt| -> bool {
            let mut acc = Elt::ZERO;
            for &c in base.spec().modulus.iter().rev() {
                acc = top.add(top.mul(acc, g), top.from_int(c as i64));
            }
            acc.is_zero()
        };
        let gamma = if base.k() == 1 {
            Elt::ONE
        } else {
            let preferred = top.pow(top.generator(), (top.q() as u64 - 1) / (base.q() as u64 - 1));
            if is_root(preferred) {
                preferred
            } else {
                top.elements().find(|&g| is_root(g)).expect("an irreducible base modulus splits in the extension")
            }
        };

        let embed: Vec<Elt> = base
            .elements()
            .map(|a| {
                let digits = code_to_digits(a.0, p, base.k());
                let mut acc = Elt::ZERO;
                for &d in digits.iter().rev() {
                    acc = top.add(top.mul(acc, gamma), top.from_int(d as i64));
                }
                if base.k() == 1 {
                    Elt(a.0)
                } else {
                    acc
                }
            })
            .collect();
        let mut unembed = vec![u32::MAX; top.q() as usize];
        for (code, &image) in embed.iter().enumerate() {
            unembed[image.0 as usize] = code as u32;
        }

        let theta = if top.k() == 1 { Elt::ONE } else { Elt(p) };
        let basis: Vec<Elt> = (0..degree).map(|i| top.pow(theta, i as u64)).collect();

        let t = degree as usize;
        let mut coords = vec![Elt::ZERO; top.q() as usize * t];
        let mut seen = vec![false; top.q() as usize];
        let bq = base.q() as u64;
        for idx in 0..(bq.pow(degree)) {
            let mut rest = idx;
            let mut kappa = vec![Elt::ZERO; t];
            let mut value = Elt::ZERO;
            for (i, slot) in kappa.iter_mut().enumerate() {
                *slot = Elt((rest % bq) as u32);
                rest /= bq;
                value = top.add(value, top.mul(embed[slot.0 as usize], basis[i]));
            }
            let v = value.0 as usize;
            if seen[v] {
                return Err(GfError::NotExtension { base: base.q(), top: top.q() });
            }
            seen[v] = true;
            coords[v * t..(v + 1) * t].copy_from_slice(&kappa);
        }

        Ok(Tower { base, top, degree, embed, unembed, basis, coords })
    }

    /// GF(p^k) inside GF(p^(k t)), both with canonical moduli.
    pub fn canonical(p: u32, k: u32, t: u32) -> Result<Tower, GfError> {
        Tower::new(Field::canonical(p, k)?, Field::canonical(p, k * t)?)
    }

    /// GF(q) inside GF(q^t).
    pub fn of_order(q: u64, t: u32) -> Result<Tower, GfError> {
        let (p, k) = split_prime_power(q)?;
        Tower::canonical(p, k, t)
    }

    pub fn base(&self) -> &Arc<Field> {
        &self.base
    }

    pub fn top(&self) -> &Arc<Field> {
        &self.top
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn embed(&self, a: Elt) -> Elt {
        self.embed[a.0 as usize]
    }

    /// The preimage of a top-field element lying in the embedded base field.
    pub fn restrict(&self, x: Elt) -> Option<Elt> {
        match self.unembed.get(x.0 as usize) {
            Some(&c) if c != u32::MAX => Some(Elt(c)),
            _ => None,
        }
    }

    /// `sum_{i<t} x^(|K|^i)`, returned as a base-field element.
    pub fn trace(&self, x: Elt) -> Result<Elt, GfError> {
        self.top.elt(x.0)?;
        let mut acc = x;
        let mut power = x;
        for _ in 1..self.degree {
            power = self.top.pow(power, self.base.q() as u64);
            acc = self.top.add(acc, power);
        }
        Ok(self.restrict(acc).expect("trace lands in the base field"))
    }

    /// Power basis `1, θ, ..., θ^(t-1)` of the top field over the base.
    pub fn basis(&self) -> &[Elt] {
        &self.basis
    }

    /// Coordinates of `x` in [`Tower::basis`].
    pub fn coordinates(&self, x: Elt) -> &[Elt] {
        let t = self.degree as usize;
        &self.coords[x.0 as usize * t..(x.0 as usize + 1) * t]
    }
}
