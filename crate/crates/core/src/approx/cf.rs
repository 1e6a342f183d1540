//! Continued fractions in `F_q((X^-1))`: `x = a_0 + 1/(a_1 + 1/(a_2 + ...))`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::series::LaurentSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    /// `a_0, a_1, ...`; every `a_i` with `i >= 1` has degree at least 1.
    pub partial_quotients: Vec<Poly>,
    /// True when the expansion terminated, i.e. `x` is rational and fully expanded.
    pub exact: bool,
}

impl ContinuedFraction {
    pub fn to_json(&self) -> Value {
        json!({
            "partial_quotients": self.partial_quotients.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "exact": self.exact,
        })
    }
}

/// Expand `x` into at most `max_terms` partial quotients.
///
/// Each step needs the digits of the current complete quotient down to exponent 0;
/// a truncated input fails with the number of quotients already produced.
pub fn cf_expand(x: &LaurentSeries, max_terms: usize) -> Result<ContinuedFraction> {
    let mut quotients = Vec::new();
    let mut cur = x.clone();
    let exhausted = |terms: usize| move |_: Error| Error::PrecisionExhaustedAfter { terms };
    while quotients.len() < max_terms {
        let a = cur.polynomial_part().map_err(exhausted(quotients.len()))?;
        quotients.push(a);
        let frac = cur.fractional_part();
        if frac.is_zero() {
            return Ok(ContinuedFraction { partial_quotients: quotients, exact: true });
        }
        cur = frac.inv().map_err(exhausted(quotients.len()))?;
    }
    Ok(ContinuedFraction { partial_quotients: quotients, exact: false })
}

/// Convergents `p_j / q_j` for `j = 0, 1, ...` by the usual three-term recurrence.
pub fn cf_convergents(cf: &ContinuedFraction) -> Vec<(Poly, Poly)> {
    let Some(first) = cf.partial_quotients.first() else { return Vec::new() };
    let spec = first.spec();
    let (mut p2, mut q2) = (Poly::zero(spec), Poly::one(spec));
    let (mut p1, mut q1) = (Poly::one(spec), Poly::zero(spec));
    let mut out = Vec::with_capacity(cf.partial_quotients.len());
    for a in &cf.partial_quotients {
        let p = &(a * &p1) + &p2;
        let q = &(a * &q1) + &q2;
        out.push((p.clone(), q.clone()));
        (p2, q2, p1, q1) = (p1, q1, p, q);
    }
    out
}

/// The rational number `[a_0; a_1, ..., a_J]`.
pub fn cf_eval(quotients: &[Poly]) -> Result<LaurentSeries> {
    let cf = ContinuedFraction { partial_quotients: quotients.to_vec(), exact: true };
    let (p, q) = cf_convergents(&cf).pop().ok_or(Error::InvalidArgument("empty expansion".into()))?;
    LaurentSeries::rational(&p, &q)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadCfReport {
    /// True when at least `depth` nontrivial partial quotients exist.
    pub verdict: bool,
    /// `max deg a_i` over `1 <= i <= depth` (over the available ones if fewer).
    pub max_deg: Option<usize>,
    /// Number of nontrivial partial quotients examined.
    pub terms: usize,
}

/// Bounded partial quotients up to `depth`. When the verdict holds,
/// `K̂(x, k^{deg q_depth - 1}) = k^{-max_deg}`.
pub fn is_bad_cf(x: &LaurentSeries, depth: usize) -> Result<BadCfReport> {
    let cf = cf_expand(x, depth + 1)?;
    let tail = &cf.partial_quotients[1..];
    let max_deg = tail.iter().filter_map(|a| a.degree()).max();
    Ok(BadCfReport { verdict: tail.len() >= depth, max_deg, terms: tail.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::parse::{parse_poly, parse_series};

    #[test]
    fn expands_examples() {
        let s = FieldSpec::prime(2).unwrap();
        let x = parse_series("X^-1 + X^-3", &s).unwrap();
        let cf = cf_expand(&x, 10).unwrap();
        let xx = Poly::x(&s);
        assert_eq!(cf.partial_quotients, vec![Poly::zero(&s), xx.clone(), xx.clone(), xx.clone()]);
        assert!(cf.exact);
        assert_eq!(cf_eval(&cf.partial_quotients).unwrap(), x);
        let conv = cf_convergents(&cf);
        assert_eq!(conv[2], (xx.clone(), parse_poly("X^2 + 1", &s).unwrap()));
        assert_eq!(conv[3].1.degree(), Some(3));

        let p = parse_series("X^3 + X", &s).unwrap();
        let cf = cf_expand(&p, 5).unwrap();
        assert_eq!(cf.partial_quotients.len(), 1);
        assert!(cf.exact);

        let inv_x = LaurentSeries::x_pow(&s, -1);
        let cf = cf_expand(&inv_x, 5).unwrap();
        assert_eq!(cf_convergents(&cf).last().unwrap(), &(Poly::one(&s), xx));
    }

    #[test]
    fn planted_quotient_is_recovered() {
        let s = FieldSpec::prime(3).unwrap();
        let a: Vec<Poly> = ["X", "X^4 + 2", "X + 1", "2*X^2"].iter().map(|t| parse_poly(t, &s).unwrap()).collect();
        let mut q = vec![Poly::zero(&s)];
        q.extend(a);
        let x = cf_eval(&q).unwrap();
        let r = is_bad_cf(&x, 3).unwrap();
        assert_eq!((r.verdict, r.max_deg), (true, Some(4)));
        let r = is_bad_cf(&x, 6).unwrap();
        assert!(!r.verdict);
    }

    #[test]
    fn truncated_input_counts_terms() {
        let s = FieldSpec::prime(2).unwrap();
        let x = parse_series("X^-1 + X^-3", &s).unwrap().truncate(-6);
        match cf_expand(&x, 10) {
            Err(Error::PrecisionExhaustedAfter { terms }) => assert!(terms >= 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
