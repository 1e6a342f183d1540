//! Polynomials over `F_q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::field::{FieldSpec, FqElem};

/// A polynomial in `F_q[X]`, coefficients stored low-to-high with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    spec: FieldSpec,
    coeffs: Vec<u8>,
}

pub type PolyVec = Vec<Poly>;

impl Poly {
    pub fn zero(spec: &FieldSpec) -> Poly {
        Poly { spec: spec.clone(), coeffs: Vec::new() }
    }

    pub fn one(spec: &FieldSpec) -> Poly {
        Poly::constant(spec, FqElem::ONE)
    }

    pub fn x(spec: &FieldSpec) -> Poly {
        Poly::monomial(spec, FqElem::ONE, 1)
    }

    pub fn constant(spec: &FieldSpec, c: FqElem) -> Poly {
        Poly::monomial(spec, c, 0)
    }

    pub fn monomial(spec: &FieldSpec, c: FqElem, degree: usize) -> Poly {
        let mut coeffs = vec![0u8; degree + 1];
        coeffs[degree] = c.0;
        Poly::from_raw(spec, coeffs)
    }

    /// From low-to-high coefficients.
    pub fn from_coeffs(spec: &FieldSpec, coeffs: &[FqElem]) -> Poly {
        Poly::from_raw(spec, coeffs.iter().map(|c| c.0).collect())
    }

    pub(crate) fn from_raw(spec: &FieldSpec, mut coeffs: Vec<u8>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { spec: spec.clone(), coeffs }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> Vec<FqElem> {
        self.coeffs.iter().map(|&c| FqElem(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        FqElem(self.coeffs.get(i).copied().unwrap_or(0))
    }

    pub fn lead(&self) -> FqElem {
        FqElem(self.coeffs.last().copied().unwrap_or(0))
    }

    /// True when the polynomial is `c X^d`.
    pub fn is_monomial(&self) -> bool {
        match self.coeffs.split_last() {
            Some((_, rest)) => rest.iter().all(|&c| c == 0),
            None => false,
        }
    }

    /// Multiplicity of `X` as a factor (0 for the zero polynomial).
    pub fn x_valuation(&self) -> usize {
        self.coeffs.iter().take_while(|&&c| c == 0).count().min(self.coeffs.len())
    }

    pub fn scale(&self, c: FqElem) -> Poly {
        let s = &self.spec;
        Poly::from_raw(s, self.coeffs.iter().map(|&a| s.mul_u8(a, c.0)).collect())
    }

    /// Multiply by `X^d`.
    pub fn shift(&self, d: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0u8; d];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { spec: self.spec.clone(), coeffs }
    }

    /// Divide by `X^d`, discarding the remainder.
    pub fn unshift(&self, d: usize) -> Poly {
        Poly::from_raw(&self.spec, self.coeffs.iter().skip(d).copied().collect())
    }

    pub fn monic(&self) -> Poly {
        match self.spec.inv(self.lead()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let s = &self.spec;
        let db = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= db {
            return (Poly::zero(s), self.clone());
        }
        let inv = s.inv_u8(divisor.coeffs[db]);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u8; rem.len() - db];
        for shift in (0..quot.len()).rev() {
            let top = rem[shift + db];
            if top == 0 {
                continue;
            }
            let f = s.mul_u8(top, inv);
            quot[shift] = f;
            let nf = s.neg_u8(f);
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = s.add_u8(rem[shift + i], s.mul_u8(nf, b));
            }
        }
        rem.truncate(db);
        (Poly::from_raw(s, quot), Poly::from_raw(s, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut acc = Poly::one(&self.spec);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// All polynomials of degree `< len` in index order (coefficient `i` is digit `i` base `k`).
    pub fn all_below_degree(spec: &FieldSpec, len: usize) -> impl Iterator<Item = Poly> + '_ {
        let k = spec.k() as u64;
        (0..k.pow(len as u32)).map(move |mut idx| {
            let mut coeffs = vec![0u8; len];
            for c in coeffs.iter_mut() {
                *c = (idx % k) as u8;
                idx /= k;
            }
            Poly::from_raw(spec, coeffs)
        })
    }

    fn zip_with(&self, other: &Poly, f: impl Fn(u8, u8) -> u8) -> Poly {
        assert_eq!(self.spec, other.spec, "polynomials over different fields");
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f(self.coeffs.get(i).copied().unwrap_or(0), other.coeffs.get(i).copied().unwrap_or(0)))
            .collect();
        Poly::from_raw(&self.spec, coeffs)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let s = self.spec.clone();
        self.zip_with(rhs, |a, b| s.add_u8(a, b))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let s = self.spec.clone();
        self.zip_with(rhs, |a, b| s.add_u8(a, s.neg_u8(b)))
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let s = &self.spec;
        Poly::from_raw(s, self.coeffs.iter().map(|&a| s.neg_u8(a)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.spec, rhs.spec, "polynomials over different fields");
        let s = &self.spec;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(s);
        }
        let mut out = vec![0u8; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = s.add_u8(out[i + j], s.mul_u8(a, b));
            }
        }
        Poly::from_raw(s, out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(i64, FqElem)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i as i64, FqElem(c)))
            .collect();
        f.write_str(&crate::parse::format_terms(&self.spec, &terms))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
