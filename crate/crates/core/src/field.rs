//! Finite fields `F_q`, `q = p^r`, with table-driven arithmetic.
//!
//! Elements are encoded as integers `0..q` via `c_0 + c_1 p + ... + c_{r-1} p^{r-1}`,
//! where `c_i` are the coefficients of the residue modulo the defining polynomial.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field size; keeps every element in a `u8`.
pub const MAX_FIELD_SIZE: u32 = 256;

/// An element of `F_q`, by index. Meaningful only together with its [`FieldSpec`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FqElem(pub(crate) u8);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn index(self) -> u32 {
        self.0 as u32
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Inner {
    p: u32,
    r: u32,
    k: u32,
    /// Monic defining polynomial over F_p, low-to-high, length r + 1.
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Description of the coefficient field; cheap to clone and shared between values.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

// Polynomials over F_p as low-to-high coefficient vectors (small helpers for construction only).
fn fp_trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = fp_trim(a.to_vec());
    let b = fp_trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = fp_inv(b[db], p);
    while a.len() > db {
        let shift = a.len() - 1 - db;
        let f = a[a.len() - 1] * lead_inv % p;
        for (i, &bi) in b.iter().enumerate() {
            a[i + shift] = (a[i + shift] + p - f * bi % p) % p;
        }
        a = fp_trim(a);
    }
    a
}

fn fp_inv(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn digits(mut idx: u32, p: u32, len: usize) -> Vec<u32> {
    let mut v = vec![0; len];
    for c in v.iter_mut() {
        *c = idx % p;
        idx /= p;
    }
    v
}

/// Irreducibility over F_p by trial division with all monic polynomials of degree ≤ r/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let r = f.len() - 1;
    for d in 1..=r / 2 {
        for idx in 0..p.pow(d as u32) {
            let mut g = digits(idx, p, d);
            g.push(1);
            if fp_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// First monic irreducible of degree r in the order of [`digits`] encoding.
fn default_modulus(p: u32, r: u32) -> Vec<u32> {
    (0..p.pow(r))
        .map(|idx| {
            let mut f = digits(idx, p, r as usize);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<FieldSpec> {
        FieldSpec::new(p, 1, None)
    }

    /// F_{p^r}. For r > 1 the modulus (monic, low-to-high, length r + 1) is optional; the
    /// first irreducible polynomial in lexicographic order is used when it is absent.
    pub fn new(p: u32, r: u32, modulus: Option<Vec<u32>>) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if r == 0 {
            return Err(Error::InvalidField("extension degree must be positive".into()));
        }
        let k = p
            .checked_pow(r)
            .filter(|&k| k <= MAX_FIELD_SIZE)
            .ok_or_else(|| Error::InvalidField(format!("field size {p}^{r} exceeds {MAX_FIELD_SIZE}")))?;
        let modulus = match (r, modulus) {
            (1, None) => vec![0, 1],
            (1, Some(m)) if m == [0, 1] => m,
            (1, Some(_)) => {
                return Err(Error::InvalidField("prime fields take no modulus".into()));
            }
            (_, None) => default_modulus(p, r),
            (_, Some(m)) => {
                if m.len() != r as usize + 1 || m[r as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidField(format!(
                        "modulus must be monic of degree {r} with coefficients below {p}"
                    )));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::InvalidField("modulus is reducible".into()));
                }
                m
            }
        };

        let ku = k as usize;
        let rr = r as usize;
        let elems: Vec<Vec<u32>> = (0..k).map(|i| digits(i, p, rr)).collect();
        let encode = |v: &[u32]| -> u8 {
            let mut idx = 0u32;
            for &c in v.iter().rev() {
                idx = idx * p + c;
            }
            idx as u8
        };
        let mut add = vec![0u8; ku * ku];
        let mut mul = vec![0u8; ku * ku];
        for a in 0..ku {
            for b in 0..ku {
                let s: Vec<u32> = (0..rr).map(|i| (elems[a][i] + elems[b][i]) % p).collect();
                add[a * ku + b] = encode(&s);
                let mut prod = vec![0u32; 2 * rr];
                for i in 0..rr {
                    for j in 0..rr {
                        prod[i + j] = (prod[i + j] + elems[a][i] * elems[b][j]) % p;
                    }
                }
                let mut red = fp_rem(&prod, &modulus, p);
                red.resize(rr, 0);
                mul[a * ku + b] = encode(&red);
            }
        }
        let neg: Vec<u8> = (0..ku).map(|a| (0..ku).find(|&b| add[a * ku + b] == 0).unwrap() as u8).collect();
        let inv: Vec<u8> =
            (0..ku).map(|a| if a == 0 { 0 } else { (1..ku).find(|&b| mul[a * ku + b] == 1).unwrap() as u8 }).collect();
        Ok(FieldSpec(Arc::new(Inner { p, r, k, modulus, add, mul, neg, inv })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn r(&self) -> u32 {
        self.0.r
    }

    /// Field size `k = p^r`.
    pub fn k(&self) -> u32 {
        self.0.k
    }

    /// Defining polynomial over F_p, low-to-high (`[0, 1]` for prime fields).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.0.k).map(|i| FqElem(i as u8))
    }

    pub fn elem(&self, index: u32) -> Result<FqElem> {
        if index < self.0.k {
            Ok(FqElem(index as u8))
        } else {
            Err(Error::InvalidArgument(format!("element index {index} >= {}", self.0.k)))
        }
    }

    /// Element with coefficient vector `(c_0, ..., c_{r-1})` over F_p.
    pub fn from_coeff_vector(&self, coeffs: &[u32]) -> Result<FqElem> {
        if coeffs.len() != self.0.r as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(Error::InvalidArgument("bad coefficient vector".into()));
        }
        let mut idx = 0;
        for &c in coeffs.iter().rev() {
            idx = idx * self.0.p + c;
        }
        Ok(FqElem(idx as u8))
    }

    /// Coefficient vector `(c_0, ..., c_{r-1})` of an element.
    pub fn coeff_vector(&self, a: FqElem) -> Vec<u32> {
        digits(a.0 as u32, self.0.p, self.0.r as usize)
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.0.add[a.0 as usize * self.0.k as usize + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.0.mul[a.0 as usize * self.0.k as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.0.neg[a.0 as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        (a.0 != 0).then(|| FqElem(self.0.inv[a.0 as usize]))
    }

    #[inline]
    pub(crate) fn add_u8(&self, a: u8, b: u8) -> u8 {
        self.0.add[a as usize * self.0.k as usize + b as usize]
    }

    #[inline]
    pub(crate) fn mul_u8(&self, a: u8, b: u8) -> u8 {
        self.0.mul[a as usize * self.0.k as usize + b as usize]
    }

    #[inline]
    pub(crate) fn neg_u8(&self, a: u8) -> u8 {
        self.0.neg[a as usize]
    }

    #[inline]
    pub(crate) fn inv_u8(&self, a: u8) -> u8 {
        self.0.inv[a as usize]
    }

    pub(crate) fn ensure_same(&self, other: &FieldSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.r == other.0.r && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl Hash for FieldSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_tables() {
        let f = FieldSpec::prime(5).unwrap();
        assert_eq!(f.k(), 5);
        let a = f.elem(3).unwrap();
        let b = f.elem(4).unwrap();
        assert_eq!(f.add(a, b).index(), 2);
        assert_eq!(f.mul(a, b).index(), 2);
        assert_eq!(f.inv(a).unwrap().index(), 2);
        assert_eq!(f.neg(a).index(), 2);
        assert!(f.inv(FqElem::ZERO).is_none());
    }

    #[test]
    fn extension_field_is_a_field() {
        for (p, r) in [(2, 2), (2, 3), (3, 2), (2, 4)] {
            let f = FieldSpec::new(p, r, None).unwrap();
            assert_eq!(f.k(), p.pow(r));
            for a in f.elements().filter(|a| !a.is_zero()) {
                let ai = f.inv(a).unwrap();
                assert_eq!(f.mul(a, ai), FqElem::ONE);
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn default_modulus_f4() {
        let f = FieldSpec::new(2, 2, None).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::new(2, 2, Some(vec![1, 0, 1])).is_err()); // X^2+1 = (X+1)^2
        assert!(FieldSpec::new(2, 9, None).is_err());
        assert!(FieldSpec::new(2, 2, Some(vec![1, 1, 1])).is_ok());
    }

    #[test]
    fn coefficient_vectors_round_trip() {
        let f = FieldSpec::new(3, 2, None).unwrap();
        for a in f.elements() {
            assert_eq!(f.from_coeff_vector(&f.coeff_vector(a)).unwrap(), a);
        }
    }
}
