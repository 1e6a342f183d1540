//! Text forms of field specifications, polynomials and series.
//!
//! ```text
//! series := "0" | sum | "(" sum ")" "/" "(" sum ")"
//! sum    := term ("+" term)*
//! term   := [coeff "*"] "X" ["^" int] | coeff | "O(X^" int ")"
//! coeff  := int                       (prime fields)
//!         | "(" c_{r-1} "," ... "," c_0 ")"   (r > 1)
//! ```
//!
//! `O(X^e)` marks a truncated value: digits at exponents `<= e` are unknown.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FqElem};
use crate::poly::Poly;
use crate::series::LaurentSeries;

/// Parse `"p"`, `"p^r"` or `"p^r:c_r,...,c_0"` (modulus coefficients high to low).
pub fn parse_field(text: &str) -> Result<FieldSpec> {
    let text = text.trim();
    let (head, modulus) = match text.split_once(':') {
        Some((h, m)) => (h, Some(m)),
        None => (text, None),
    };
    let bad = |what: &str| Error::InvalidField(format!("{what} in {text:?}"));
    let (p, r) = match head.split_once('^') {
        Some((p, r)) => (p.trim().parse::<u32>(), r.trim().parse::<u32>()),
        None => (head.trim().parse::<u32>(), Ok(1)),
    };
    let (p, r) = (p.map_err(|_| bad("bad characteristic"))?, r.map_err(|_| bad("bad degree"))?);
    let modulus = match modulus {
        None => None,
        Some(m) => {
            let mut c = m
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("bad modulus"))?;
            c.reverse();
            Some(c)
        }
    };
    FieldSpec::new(p, r, modulus)
}

/// Inverse of [`parse_field`].
pub fn format_field(spec: &FieldSpec) -> String {
    if spec.r() == 1 {
        return spec.p().to_string();
    }
    let m: Vec<String> = spec.modulus().iter().rev().map(|c| c.to_string()).collect();
    format!("{}^{}:{}", spec.p(), spec.r(), m.join(","))
}

pub fn format_coeff(spec: &FieldSpec, c: FqElem) -> String {
    if spec.r() == 1 {
        c.index().to_string()
    } else {
        let v: Vec<String> = spec.coeff_vector(c).iter().rev().map(|d| d.to_string()).collect();
        format!("({})", v.join(","))
    }
}

/// Canonical sum of `(exponent, coefficient)` terms, given in descending order.
pub fn format_terms(spec: &FieldSpec, terms: &[(i64, FqElem)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = terms
        .iter()
        .map(|&(e, c)| {
            let x = match e {
                0 => return format_coeff(spec, c),
                1 => "X".to_string(),
                _ => format!("X^{e}"),
            };
            if c == FqElem::ONE {
                x
            } else {
                format!("{}*{x}", format_coeff(spec, c))
            }
        })
        .collect();
    parts.join(" + ")
}

pub fn format_series(x: &LaurentSeries) -> String {
    let spec = x.spec();
    if let Some((num, den)) = x.as_rational() {
        if den.is_monomial() {
            let shift = den.degree().unwrap() as i64;
            let terms: Vec<(i64, FqElem)> = (0..=num.degree().map_or(-1, |d| d as i64))
                .rev()
                .map(|i| (i - shift, num.coeff(i as usize)))
                .filter(|t| !t.1.is_zero())
                .collect();
            return format_terms(spec, &terms);
        }
        return format!("({num})/({den})");
    }
    let kb = x.known_below().unwrap();
    let terms = x.terms_down_to(kb).unwrap_or_default();
    let tail = format!("O(X^{})", kb - 1);
    if terms.is_empty() {
        tail
    } else {
        format!("{} + {tail}", format_terms(spec, &terms))
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    spec: &'a FieldSpec,
}

enum Term {
    Exact(i64, FqElem),
    Unknown(i64),
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn int(&mut self) -> Result<(BigInt, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse::<BigInt>()
            .map(|v| (v, start))
            .map_err(|_| Error::Syntax { pos: start, msg: "expected an integer".into() })
    }

    fn exponent(&mut self) -> Result<i64> {
        let (v, start) = self.int()?;
        i64::try_from(&v).map_err(|_| Error::Syntax { pos: start, msg: "exponent too large".into() })
    }

    fn digit(&mut self, bound: u32) -> Result<u32> {
        let (v, start) = self.int()?;
        match u32::try_from(&v) {
            Ok(d) if d < bound => Ok(d),
            _ => Err(Error::CoefficientOutOfRange { value: v.to_string(), pos: start }),
        }
    }

    fn coeff(&mut self) -> Result<FqElem> {
        self.skip_ws();
        let start = self.pos;
        let spec = self.spec;
        if spec.r() > 1 && self.eat('(') {
            let mut digits = vec![self.digit(spec.p())?];
            while self.eat(',') {
                digits.push(self.digit(spec.p())?);
            }
            self.expect(')')?;
            if digits.len() != spec.r() as usize {
                return Err(Error::Syntax { pos: start, msg: format!("expected {} tuple entries", spec.r()) });
            }
            digits.reverse();
            return spec.from_coeff_vector(&digits);
        }
        // A bare integer is an element of the prime field.
        let d = self.digit(spec.p())?;
        spec.elem(d)
    }

    fn x_power(&mut self) -> Result<i64> {
        self.expect('X')?;
        if self.eat('^') {
            if self.eat('(') {
                let e = self.exponent()?;
                self.expect(')')?;
                Ok(e)
            } else {
                self.exponent()
            }
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        if self.src[self.pos..].starts_with("O(") {
            self.pos += 2;
            let e = self.x_power()?;
            self.expect(')')?;
            return Ok(Term::Unknown(e));
        }
        if self.peek() == Some('X') {
            return Ok(Term::Exact(self.x_power()?, FqElem::ONE));
        }
        let c = self.coeff()?;
        if self.eat('*') {
            Ok(Term::Exact(self.x_power()?, c))
        } else {
            Ok(Term::Exact(0, c))
        }
    }

    fn sum(&mut self) -> Result<LaurentSeries> {
        let mut terms = vec![self.term()?];
        while self.eat('+') {
            terms.push(self.term()?);
        }
        let mut exact = Vec::new();
        let mut unknown: Option<i64> = None;
        for t in terms {
            match t {
                Term::Exact(e, c) => exact.push((e, c)),
                Term::Unknown(e) => unknown = Some(unknown.map_or(e, |u: i64| u.max(e))),
            }
        }
        let x = LaurentSeries::from_terms(self.spec, &exact);
        Ok(match unknown {
            Some(e) => x.truncate(e + 1),
            None => x,
        })
    }

    fn series(&mut self) -> Result<LaurentSeries> {
        self.skip_ws();
        let save = self.pos;
        if self.eat('(') {
            // Either a quotient "(num)/(den)" or a tuple coefficient.
            if let Ok(num) = self.sum() {
                if self.eat(')') && self.eat('/') {
                    self.expect('(')?;
                    let den = self.sum()?;
                    self.expect(')')?;
                    let den_pos = self.pos;
                    return num.checked_div(&den).map_err(|e| match e {
                        Error::DivisionByZero => Error::Syntax { pos: den_pos, msg: "zero denominator".into() },
                        e => e,
                    });
                }
            }
            self.pos = save;
        }
        self.sum()
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

pub fn parse_series(text: &str, spec: &FieldSpec) -> Result<LaurentSeries> {
    let mut p = Parser { src: text, pos: 0, spec };
    let x = p.series()?;
    p.finish()?;
    Ok(x)
}

/// Parse a polynomial (a series with no negative exponents and no truncation).
pub fn parse_poly(text: &str, spec: &FieldSpec) -> Result<Poly> {
    let x = parse_series(text, spec)?;
    match x.as_rational() {
        Some((num, den)) if den.is_one() => Ok(num.clone()),
        _ => Err(Error::Syntax { pos: 0, msg: format!("{text:?} is not a polynomial") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnitude::Magnitude;

    #[test]
    fn parses_examples() {
        let s = FieldSpec::prime(2).unwrap();
        let x = parse_series("X^2 + 1 + X^-3", &s).unwrap();
        assert_eq!(x.lead_exp().unwrap(), Some(2));
        assert_eq!(x.to_string(), "X^2 + 1 + X^-3");
        assert!(parse_series("0", &s).unwrap().is_zero());
        assert!(matches!(parse_series("2*X^-1", &s), Err(Error::CoefficientOutOfRange { pos: 0, .. })));
    }

    #[test]
    fn duplicates_sum_and_order_is_free() {
        let s = FieldSpec::prime(3).unwrap();
        let x = parse_series("X^-1 + 2*X + X^-1 + 1", &s).unwrap();
        assert_eq!(x.to_string(), "2*X + 1 + 2*X^-1");
    }

    #[test]
    fn extension_coefficients() {
        let s = FieldSpec::new(2, 2, None).unwrap();
        let x = parse_series("(1,0)*X + (1,1)", &s).unwrap();
        assert_eq!(x.to_string(), "(1,0)*X + (1,1)");
        assert!(parse_series("(1,0,1)*X", &s).is_err());
        assert_eq!(format_field(&s), "2^2:1,1,1");
        assert_eq!(parse_field("2^2:1,1,1").unwrap(), s);
    }

    #[test]
    fn rational_and_truncated_forms() {
        let s = FieldSpec::prime(2).unwrap();
        let x = parse_series("(X^2 + 1)/(X^3 + X)", &s).unwrap();
        assert_eq!(x.to_string(), "X^-1");
        let y = parse_series("(X^2 + 1)/(X^3 + 1)", &s).unwrap();
        assert_eq!(parse_series(&y.to_string(), &s).unwrap(), y);
        let z = parse_series("X + X^-2 + O(X^-5)", &s).unwrap();
        assert_eq!(z.known_below(), Some(-4));
        assert_eq!(z.to_string(), "X + X^-2 + O(X^-5)");
        let u = parse_series("O(X^-3)", &s).unwrap();
        assert_eq!(u.norm_bound(), Magnitude::Pow(-3));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let s = FieldSpec::prime(2).unwrap();
        assert!(matches!(parse_series("X^", &s), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_series("X + + 1", &s), Err(Error::Syntax { .. })));
        assert!(matches!(parse_series("X 1", &s), Err(Error::Syntax { pos: 2, .. })));
    }
}
