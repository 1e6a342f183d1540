//! Elements of `F_q((X^-1))`.
//!
//! A value is either an exact element of `F_q(X)` or a truncated series whose
//! coefficients are known at every exponent `>= known_below`. Arithmetic is total:
//! precision loss only surfaces when a norm, coefficient or polynomial part is
//! requested that the tracked digits cannot determine.

use std::cmp::{max, min};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FqElem};
use crate::magnitude::Magnitude;
use crate::poly::Poly;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// `num / den` with `den` monic and coprime to `num`.
    Exact { num: Poly, den: Poly },
    /// Coefficients from exponent `top` downward to `known_below`, leading one nonzero.
    /// An empty vector means every known digit vanished; then `top == known_below - 1`.
    Approx { top: i64, coeffs: Vec<u8>, known_below: i64 },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    spec: FieldSpec,
    repr: Repr,
}

fn exact(num: Poly, den: Poly) -> Repr {
    debug_assert!(!den.is_zero());
    if num.is_zero() {
        let s = den.spec().clone();
        return Repr::Exact { num, den: Poly::one(&s) };
    }
    let (num, den) = if den.is_monomial() {
        let v = min(num.x_valuation(), den.degree().unwrap());
        (num.unshift(v), den.unshift(v))
    } else {
        let g = num.gcd(&den);
        if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        }
    };
    let lead = den.lead();
    if lead == FqElem::ONE {
        Repr::Exact { num, den }
    } else {
        let inv = num.spec().inv(lead).unwrap();
        Repr::Exact { num: num.scale(inv), den: den.scale(inv) }
    }
}

fn approx(top: i64, mut coeffs: Vec<u8>, known_below: i64) -> Repr {
    let lead_zeros = coeffs.iter().take_while(|&&c| c == 0).count();
    coeffs.drain(..lead_zeros);
    let top = if coeffs.is_empty() { known_below - 1 } else { top - lead_zeros as i64 };
    Repr::Approx { top, coeffs, known_below }
}

impl LaurentSeries {
    pub fn zero(spec: &FieldSpec) -> Self {
        Self::from_poly(&Poly::zero(spec))
    }

    pub fn one(spec: &FieldSpec) -> Self {
        Self::from_poly(&Poly::one(spec))
    }

    /// `c X^e`.
    pub fn monomial(spec: &FieldSpec, c: FqElem, e: i64) -> Self {
        Self::from_poly(&Poly::constant(spec, c)).mul_x_pow(e)
    }

    pub fn x_pow(spec: &FieldSpec, e: i64) -> Self {
        Self::monomial(spec, FqElem::ONE, e)
    }

    pub fn from_poly(p: &Poly) -> Self {
        let spec = p.spec().clone();
        LaurentSeries { repr: Repr::Exact { num: p.clone(), den: Poly::one(&spec) }, spec }
    }

    /// Finite sum of terms `c X^e` (duplicates add up).
    pub fn from_terms(spec: &FieldSpec, terms: &[(i64, FqElem)]) -> Self {
        let Some(low) = terms.iter().map(|t| t.0).min() else {
            return Self::zero(spec);
        };
        let shift = min(low, 0);
        let mut num = Poly::zero(spec);
        for &(e, c) in terms {
            num = &num + &Poly::monomial(spec, c, (e - shift) as usize);
        }
        let den = Poly::monomial(spec, FqElem::ONE, (-shift) as usize);
        LaurentSeries { spec: spec.clone(), repr: exact(num, den) }
    }

    /// The rational function `num / den`.
    pub fn rational(num: &Poly, den: &Poly) -> Result<Self> {
        num.spec().ensure_same(den.spec())?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(LaurentSeries { spec: num.spec().clone(), repr: exact(num.clone(), den.clone()) })
    }

    /// A truncated series: `coeffs[i]` is the coefficient of `X^(top - i)` and every
    /// exponent `>= known_below` not listed is zero.
    pub fn truncated(spec: &FieldSpec, top: i64, coeffs: &[FqElem], known_below: i64) -> Self {
        let mut digits = Vec::with_capacity(max(top - known_below + 1, 0) as usize);
        for e in (known_below..=top).rev() {
            let i = (top - e) as usize;
            digits.push(coeffs.get(i).map_or(0, |c| c.0));
        }
        let top = max(top, known_below - 1);
        LaurentSeries { spec: spec.clone(), repr: approx(top, digits, known_below) }
    }

    /// Value known to be of absolute value `< k^known_below` and nothing more.
    pub fn unknown(spec: &FieldSpec, known_below: i64) -> Self {
        Self::truncated(spec, known_below - 1, &[], known_below)
    }

    /// Uniformly random truncated series with digits at exponents `known_below..=top`.
    pub fn random<R: Rng + ?Sized>(spec: &FieldSpec, rng: &mut R, top: i64, known_below: i64) -> Self {
        let k = spec.k();
        let digits: Vec<FqElem> = (known_below..=top).map(|_| FqElem(rng.gen_range(0..k) as u8)).collect();
        Self::truncated(spec, top, &digits, known_below)
    }

    /// Uniformly random exact Laurent polynomial with support in `low..=top`.
    pub fn random_exact<R: Rng + ?Sized>(spec: &FieldSpec, rng: &mut R, top: i64, low: i64) -> Self {
        let k = spec.k();
        let terms: Vec<(i64, FqElem)> = (low..=top).map(|e| (e, FqElem(rng.gen_range(0..k) as u8))).collect();
        Self::from_terms(spec, &terms)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact { .. })
    }

    /// Lowest exponent whose coefficient is known; `None` for exact values.
    pub fn known_below(&self) -> Option<i64> {
        match &self.repr {
            Repr::Exact { .. } => None,
            Repr::Approx { known_below, .. } => Some(*known_below),
        }
    }

    /// True only for the exact zero.
    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, Repr::Exact { num, .. } if num.is_zero())
    }

    /// The numerator and denominator of an exact value.
    pub fn as_rational(&self) -> Option<(&Poly, &Poly)> {
        match &self.repr {
            Repr::Exact { num, den } => Some((num, den)),
            Repr::Approx { .. } => None,
        }
    }

    /// True for exact values whose denominator is a power of `X`.
    pub fn is_laurent_polynomial(&self) -> bool {
        matches!(&self.repr, Repr::Exact { den, .. } if den.is_monomial())
    }

    /// Exponent of the leading term; `Ok(None)` for zero.
    pub fn lead_exp(&self) -> Result<Option<i64>> {
        match &self.repr {
            Repr::Exact { num, den } => Ok(num.degree().map(|a| a as i64 - den.degree().unwrap() as i64)),
            Repr::Approx { top, coeffs, known_below } => {
                if coeffs.is_empty() {
                    Err(Error::PrecisionExhausted(format!("all digits down to X^{known_below} vanish")))
                } else {
                    Ok(Some(*top))
                }
            }
        }
    }

    pub fn norm(&self) -> Result<Magnitude> {
        Ok(self.lead_exp()?.map_or(Magnitude::Zero, Magnitude::Pow))
    }

    /// An upper bound for the norm that is always available.
    pub fn norm_bound(&self) -> Magnitude {
        match &self.repr {
            Repr::Approx { top, .. } => Magnitude::Pow(*top),
            Repr::Exact { .. } => self.norm().unwrap(),
        }
    }

    /// Coefficient of `X^e`.
    pub fn coeff(&self, e: i64) -> Result<FqElem> {
        match &self.repr {
            Repr::Approx { top, coeffs, known_below } => {
                if e < *known_below {
                    Err(Error::PrecisionExhausted(format!("coefficient of X^{e} is not tracked")))
                } else if e > *top {
                    Ok(FqElem::ZERO)
                } else {
                    Ok(FqElem(coeffs[(top - e) as usize]))
                }
            }
            Repr::Exact { num, den } => {
                let lead = match self.lead_exp()? {
                    None => return Ok(FqElem::ZERO),
                    Some(l) => l,
                };
                if e > lead {
                    return Ok(FqElem::ZERO);
                }
                if den.is_monomial() {
                    let shift = den.degree().unwrap() as i64;
                    return Ok(num.coeff((e + shift) as usize));
                }
                Ok(self.digits_down_to(e)?.last().copied().map_or(FqElem::ZERO, FqElem))
            }
        }
    }

    /// Digits from the leading exponent down to `low` inclusive (empty if `low` exceeds it).
    fn digits_down_to(&self, low: i64) -> Result<Vec<u8>> {
        match &self.repr {
            Repr::Approx { top, coeffs, known_below } => {
                if low < *known_below {
                    return Err(Error::PrecisionExhausted(format!("coefficient of X^{low} is not tracked")));
                }
                Ok(coeffs.iter().take(max(top - low + 1, 0) as usize).copied().collect())
            }
            Repr::Exact { num, den } => {
                let Some(lead) = self.lead_exp()? else { return Ok(Vec::new()) };
                if low > lead {
                    return Ok(Vec::new());
                }
                // floor(num X^s / den) holds the digits at exponents >= -s, shifted up by s.
                let s = max(-low, 0) as usize;
                let q = if den.is_monomial() {
                    num.shift(s).unshift(den.degree().unwrap())
                } else {
                    num.shift(s).div_rem(den).0
                };
                let mut out = Vec::with_capacity((lead - low + 1) as usize);
                for e in (low..=lead).rev() {
                    out.push(q.coeff((e + s as i64) as usize).0);
                }
                Ok(out)
            }
        }
    }

    /// Nonzero terms at exponents `>= low`, descending.
    pub fn terms_down_to(&self, low: i64) -> Result<Vec<(i64, FqElem)>> {
        let top = match self.lead_exp() {
            Ok(Some(l)) => l,
            Ok(None) => return Ok(Vec::new()),
            Err(_) => match &self.repr {
                Repr::Approx { known_below, .. } if low >= *known_below => return Ok(Vec::new()),
                _ => return Err(Error::PrecisionExhausted(format!("terms below X^{low} requested"))),
            },
        };
        let digits = self.digits_down_to(low)?;
        Ok(digits.into_iter().enumerate().filter(|(_, c)| *c != 0).map(|(i, c)| (top - i as i64, FqElem(c))).collect())
    }

    /// Forget every digit below `known_below`.
    pub fn truncate(&self, known_below: i64) -> Self {
        match &self.repr {
            Repr::Approx { known_below: kb, .. } if *kb >= known_below => self.clone(),
            _ => {
                let top = match self.lead_exp() {
                    Ok(Some(l)) => l,
                    Ok(None) => known_below - 1,
                    Err(_) => known_below - 1,
                };
                let digits = if top >= known_below { self.digits_down_to(known_below).unwrap() } else { Vec::new() };
                LaurentSeries { spec: self.spec.clone(), repr: approx(max(top, known_below - 1), digits, known_below) }
            }
        }
    }

    /// Exact Laurent polynomial made of the terms at exponents `>= low`.
    pub fn round_at(&self, low: i64) -> Result<Self> {
        Ok(Self::from_terms(&self.spec, &self.terms_down_to(low)?))
    }

    /// Part with exponents `>= 0`.
    pub fn polynomial_part(&self) -> Result<Poly> {
        match &self.repr {
            Repr::Exact { num, den } => Ok(num.div_rem(den).0),
            Repr::Approx { .. } => {
                let terms = self.terms_down_to(0)?;
                let spec = &self.spec;
                let mut p = Poly::zero(spec);
                for (e, c) in terms {
                    p = &p + &Poly::monomial(spec, c, e as usize);
                }
                Ok(p)
            }
        }
    }

    /// `x - [x]`; always representable (the digits at exponents `>= 0` are zero by definition).
    pub fn fractional_part(&self) -> Self {
        match &self.repr {
            Repr::Exact { num, den } => {
                LaurentSeries { spec: self.spec.clone(), repr: exact(num.rem(den), den.clone()) }
            }
            Repr::Approx { top, coeffs, known_below } => {
                let kb = min(*known_below, 0);
                let digits: Vec<u8> = if *known_below > 0 {
                    Vec::new()
                } else {
                    coeffs.iter().skip(max(top + 1, 0) as usize).copied().collect()
                };
                let t = if *known_below > 0 { -1 } else { min(*top, -1) };
                LaurentSeries { spec: self.spec.clone(), repr: approx(t, digits, kb) }
            }
        }
    }

    /// `‖x - [x]‖`, the distance to the nearest polynomial.
    pub fn frac_norm(&self) -> Result<Magnitude> {
        self.fractional_part().norm()
    }

    pub fn scale(&self, c: FqElem) -> Self {
        if c == FqElem::ONE {
            return self.clone();
        }
        match &self.repr {
            Repr::Exact { num, den } => {
                LaurentSeries { spec: self.spec.clone(), repr: exact(num.scale(c), den.clone()) }
            }
            Repr::Approx { top, coeffs, known_below } => {
                let s = &self.spec;
                let d = coeffs.iter().map(|&a| s.mul_u8(a, c.0)).collect();
                LaurentSeries { spec: s.clone(), repr: approx(*top, d, *known_below) }
            }
        }
    }

    /// Multiply by `X^e`.
    pub fn mul_x_pow(&self, e: i64) -> Self {
        if e == 0 {
            return self.clone();
        }
        match &self.repr {
            Repr::Exact { num, den } => {
                let repr = if e > 0 {
                    exact(num.shift(e as usize), den.clone())
                } else {
                    exact(num.clone(), den.shift((-e) as usize))
                };
                LaurentSeries { spec: self.spec.clone(), repr }
            }
            Repr::Approx { top, coeffs, known_below } => LaurentSeries {
                spec: self.spec.clone(),
                repr: Repr::Approx { top: top + e, coeffs: coeffs.clone(), known_below: known_below + e },
            },
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Exact { num, den } => {
                if num.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(LaurentSeries { spec: self.spec.clone(), repr: exact(den.clone(), num.clone()) })
            }
            Repr::Approx { top, coeffs, known_below } => {
                if coeffs.is_empty() {
                    return Err(Error::PrecisionExhausted("divisor has no known nonzero digit".into()));
                }
                let s = &self.spec;
                let len = coeffs.len();
                let a0inv = s.inv_u8(coeffs[0]);
                let mut c = vec![0u8; len];
                for t in 0..len {
                    let mut acc = if t == 0 { 1u8 } else { 0u8 };
                    for j in 1..=t {
                        let prod = s.mul_u8(coeffs[j], c[t - j]);
                        acc = s.add_u8(acc, s.neg_u8(prod));
                    }
                    c[t] = s.mul_u8(acc, a0inv);
                }
                let b = *top;
                Ok(LaurentSeries { spec: s.clone(), repr: approx(-b, c, -2 * b + known_below) })
            }
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        self.spec.ensure_same(&rhs.spec)?;
        Ok(self * &rhs.inv()?)
    }

    /// Top exponent and lowest known exponent, treating exact values as known everywhere.
    fn approx_view(&self, low: i64) -> (i64, Vec<u8>, i64) {
        match &self.repr {
            Repr::Approx { top, coeffs, known_below } => (*top, coeffs.clone(), *known_below),
            Repr::Exact { .. } => match self.lead_exp().unwrap() {
                None => (low - 1, Vec::new(), low),
                Some(l) if l < low => (low - 1, Vec::new(), low),
                Some(l) => (l, self.digits_down_to(low).unwrap(), low),
            },
        }
    }

    fn add_impl(&self, rhs: &Self, negate: bool) -> Self {
        assert_eq!(self.spec, rhs.spec, "series over different fields");
        let s = &self.spec;
        if let (Repr::Exact { num: a, den: b }, Repr::Exact { num: c, den: d }) = (&self.repr, &rhs.repr) {
            let c = if negate { -c } else { c.clone() };
            let repr = if b == d {
                exact(a + &c, b.clone())
            } else if b.is_monomial() && d.is_monomial() {
                let (db, dd) = (b.degree().unwrap(), d.degree().unwrap());
                let m = max(db, dd);
                exact(&a.shift(m - db) + &c.shift(m - dd), Poly::monomial(s, FqElem::ONE, m))
            } else {
                exact(&(a * d) + &(&c * b), b * d)
            };
            return LaurentSeries { spec: s.clone(), repr };
        }
        let kb = max(self.known_below().unwrap_or(i64::MIN), rhs.known_below().unwrap_or(i64::MIN));
        let (tx, dx, _) = self.approx_view(kb);
        let (ty, dy, _) = rhs.approx_view(kb);
        let top = max(max(tx, ty), kb - 1);
        let len = (top - kb + 1).max(0) as usize;
        let mut out = vec![0u8; len];
        for (i, &c) in dx.iter().enumerate() {
            let e = tx - i as i64;
            if e >= kb {
                out[(top - e) as usize] = c;
            }
        }
        for (i, &c) in dy.iter().enumerate() {
            let e = ty - i as i64;
            if e >= kb {
                let slot = &mut out[(top - e) as usize];
                let c = if negate { s.neg_u8(c) } else { c };
                *slot = s.add_u8(*slot, c);
            }
        }
        LaurentSeries { spec: s.clone(), repr: approx(top, out, kb) }
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        assert_eq!(self.spec, rhs.spec, "series over different fields");
        let s = &self.spec;
        if let (Repr::Exact { num: a, den: b }, Repr::Exact { num: c, den: d }) = (&self.repr, &rhs.repr) {
            return LaurentSeries { spec: s.clone(), repr: exact(a * c, b * d) };
        }
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(s);
        }
        // Norm bound exponents: an all-unknown value is below k^(known_below - 1).
        let lead = |x: &Self| x.norm_bound().exponent().unwrap();
        let (lx, ly) = (lead(self), lead(rhs));
        let kb = match (self.known_below(), rhs.known_below()) {
            (Some(a), Some(b)) => max(a + ly, lx + b),
            (Some(a), None) => a + ly,
            (None, Some(b)) => lx + b,
            (None, None) => unreachable!(),
        };
        let (tx, dx, kx) = self.approx_view(kb - ly);
        let (ty, dy, ky) = rhs.approx_view(kb - lx);
        let top = max(tx + ty, kb - 1);
        let len = (top - kb + 1).max(0) as usize;
        let mut out = vec![0u8; len];
        for (i, &a) in dx.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let ei = tx - i as i64;
            for (j, &b) in dy.iter().enumerate() {
                let e = ei + ty - j as i64;
                if e < kb {
                    break;
                }
                debug_assert!(ei >= kx && ty - j as i64 >= ky);
                let slot = &mut out[(top - e) as usize];
                *slot = s.add_u8(*slot, s.mul_u8(a, b));
            }
        }
        LaurentSeries { spec: s.clone(), repr: approx(top, out, kb) }
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add_impl(rhs, false)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add_impl(rhs, true)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.mul_impl(rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        let s = &self.spec;
        self.scale(s.neg(FqElem::ONE))
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::format_series(self))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries({self})")
    }
}

/// `‖v‖_∞`, the largest coordinate norm.
pub fn height(v: &[LaurentSeries]) -> Result<Magnitude> {
    v.iter().try_fold(Magnitude::Zero, |acc, x| Ok(max(acc, x.norm()?)))
}

/// `⟨v⟩`, the distance from `v` to the polynomial lattice.
pub fn lattice_distance(v: &[LaurentSeries]) -> Result<Magnitude> {
    v.iter().try_fold(Magnitude::Zero, |acc, x| Ok(max(acc, x.frac_norm()?)))
}

/// Height of a polynomial vector.
pub fn poly_height(v: &[Poly]) -> Magnitude {
    v.iter().filter_map(|p| p.degree()).map(|d| Magnitude::Pow(d as i64)).max().unwrap_or(Magnitude::Zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn t(spec: &FieldSpec, terms: &[(i64, u32)]) -> LaurentSeries {
        let v: Vec<_> = terms.iter().map(|&(e, c)| (e, spec.elem(c).unwrap())).collect();
        LaurentSeries::from_terms(spec, &v)
    }

    #[test]
    fn norms_of_examples() {
        let s = f2();
        assert_eq!(t(&s, &[(2, 1), (0, 1), (-1, 1)]).norm().unwrap(), Magnitude::Pow(2));
        assert_eq!(LaurentSeries::zero(&s).norm().unwrap(), Magnitude::Zero);
        assert_eq!(LaurentSeries::x_pow(&s, -5).norm().unwrap(), Magnitude::Pow(-5));
        let x = LaurentSeries::x_pow(&s, 2);
        let y = t(&s, &[(-3, 1), (0, 1)]);
        assert_eq!((&x * &y).norm().unwrap(), Magnitude::Pow(2));
    }

    #[test]
    fn polynomial_and_fractional_parts() {
        let s = f2();
        let x = t(&s, &[(1, 1), (0, 1), (-2, 1)]);
        assert_eq!(x.polynomial_part().unwrap(), Poly::from_raw(&s, vec![1, 1]));
        assert_eq!(x.frac_norm().unwrap(), Magnitude::Pow(-2));
        assert!(LaurentSeries::x_pow(&s, -1).polynomial_part().unwrap().is_zero());
        let v = [LaurentSeries::x_pow(&s, -1), LaurentSeries::x_pow(&s, -3)];
        assert_eq!(lattice_distance(&v).unwrap(), Magnitude::Pow(-1));
        assert_eq!(height(&v).unwrap(), Magnitude::Pow(-1));
    }

    #[test]
    fn characteristic_two_cancels() {
        let s = f2();
        let x = t(&s, &[(1, 1), (0, 1)]);
        assert!((&x + &x).is_zero());
    }

    #[test]
    fn rational_expansion_matches_truncated_inverse() {
        let s = FieldSpec::prime(3).unwrap();
        let den = Poly::from_raw(&s, vec![2, 1, 0, 1]);
        let x = LaurentSeries::rational(&Poly::one(&s), &den).unwrap();
        let approx_den = LaurentSeries::from_poly(&den).truncate(-20);
        let y = approx_den.inv().unwrap();
        for e in -20..=-3 {
            assert_eq!(x.coeff(e).unwrap(), y.coeff(e).unwrap(), "exponent {e}");
        }
        assert_eq!(y.known_below(), Some(-26));
    }

    #[test]
    fn truncated_products_track_precision() {
        let s = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let xe = LaurentSeries::random_exact(&s, &mut rng, 2, -12);
            let ye = LaurentSeries::random_exact(&s, &mut rng, 1, -12);
            let (x, y) = (xe.truncate(-8), ye.truncate(-6));
            let p = &x * &y;
            let exact_p = &xe * &ye;
            let kb = p.known_below().unwrap();
            for e in kb..=4 {
                assert_eq!(p.coeff(e).unwrap(), exact_p.coeff(e).unwrap());
            }
            let sum = &x + &y;
            assert_eq!(sum.known_below(), Some(-6));
            for e in -6..=3 {
                assert_eq!(sum.coeff(e).unwrap(), (&xe + &ye).coeff(e).unwrap());
            }
        }
    }

    #[test]
    fn cancellation_defers_the_error_to_the_norm() {
        let s = f2();
        let x = t(&s, &[(0, 1), (-1, 1)]).truncate(-3);
        let d = &x - &x;
        assert!(matches!(d.norm(), Err(Error::PrecisionExhausted(_))));
        assert_eq!(d.norm_bound(), Magnitude::Pow(-4));
        assert!(d.polynomial_part().unwrap().is_zero());
    }

    #[test]
    fn division_errors() {
        let s = f2();
        let one = LaurentSeries::one(&s);
        assert_eq!(one.checked_div(&LaurentSeries::zero(&s)), Err(Error::DivisionByZero));
        let u = LaurentSeries::unknown(&s, -2);
        assert!(matches!(one.checked_div(&u), Err(Error::PrecisionExhausted(_))));
    }
}
