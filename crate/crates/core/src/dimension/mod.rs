//! Hausdorff-dimension lower bounds for winning sets, and empirical box counts of
//! truncated badly approximable sets.

mod boxcount;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FqElem};
use crate::game::{FormalBall, GameParams, GameTranscript};
use crate::magnitude::{floor_log, k_pow};
use crate::matrix::SeriesMatrix;
use crate::series::LaurentSeries;

pub use boxcount::{box_count_bad, required_depth, BoxCountRow};

/// Largest number of centres `centers` will materialise.
const MAX_CENTERS: u128 = 1 << 20;

/// How many disjoint balls of radius `βρ` fit in a ball of radius `ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingCount {
    pub beta: BigRational,
    pub k: u32,
    pub mn: usize,
    /// `k^{i-1} <= β < k^i`.
    pub i: i64,
    /// `(k^{-i-1})^{mn}`; below one when `i = 0`.
    pub paper_count: BigRational,
    /// `k^{-i·mn}`: centres differ in the digits at exponents `-1, ..., i`.
    pub max_count: BigInt,
}

impl PackingCount {
    pub fn paper_exponent(&self) -> i64 {
        (-self.i - 1) * self.mn as i64
    }

    pub fn max_exponent(&self) -> i64 {
        -self.i * self.mn as i64
    }

    /// Centres of a disjoint family inside the unit ball: all matrices whose entries
    /// are supported on exponents `-1, ..., low`. `finest` selects `low = i`
    /// (the maximal family), otherwise `low = i + 1`.
    pub fn centers(&self, spec: &FieldSpec, m: usize, n: usize, finest: bool) -> Result<Vec<SeriesMatrix>> {
        if spec.k() != self.k || m * n != self.mn {
            return Err(Error::InvalidArgument("packing count computed for another shape".into()));
        }
        let low = if finest { self.i } else { self.i + 1 };
        let digits = (-low).max(0) as usize;
        let slots = digits * self.mn;
        let total = (self.k as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
        if total > MAX_CENTERS {
            return Err(Error::SearchBudgetExceeded { needed: total, budget: MAX_CENTERS });
        }
        let elems: Vec<FqElem> = spec.elements().collect();
        let mut out = Vec::with_capacity(total as usize);
        for mut idx in 0..total {
            let mut entries = Vec::with_capacity(self.mn);
            for _ in 0..self.mn {
                let mut terms = Vec::with_capacity(digits);
                for d in 1..=digits {
                    let c = elems[(idx % self.k as u128) as usize];
                    idx /= self.k as u128;
                    if !c.is_zero() {
                        terms.push((-(d as i64), c));
                    }
                }
                entries.push(LaurentSeries::from_terms(spec, &terms));
            }
            out.push(SeriesMatrix::new(spec, m, n, entries)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "beta": self.beta.to_string(),
            "k": self.k,
            "mn": self.mn,
            "i": self.i,
            "paper_count": self.paper_count.to_string(),
            "paper_exponent": self.paper_exponent(),
            "max_count": self.max_count.to_string(),
            "max_exponent": self.max_exponent(),
        })
    }
}

fn check_unit_interval(name: &str, x: &BigRational) -> Result<()> {
    if x.is_positive() && x < &BigRational::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must lie in (0, 1), got {x}")))
    }
}

pub fn packing_count(beta: &BigRational, m: usize, n: usize, k: u32) -> Result<PackingCount> {
    check_unit_interval("beta", beta)?;
    let i = floor_log(k, beta) + 1;
    let mn = m * n;
    let paper_count = k_pow(k, (-i - 1) * mn as i64);
    let max_count = BigInt::from(k).pow((-i * mn as i64) as u32);
    Ok(PackingCount { beta: beta.clone(), k, mn, i, paper_count, max_count })
}

/// `log N(β) / |log αβ|` with the maximal packing.
#[derive(Clone, Debug, PartialEq)]
pub enum DimBound {
    /// `αβ` is an integral power of `k`, so the ratio is rational.
    Exact(BigRational),
    Approx(f64),
}

impl DimBound {
    pub fn to_f64(&self) -> f64 {
        match self {
            DimBound::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            DimBound::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            DimBound::Exact(r) => Some(r),
            DimBound::Approx(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            DimBound::Exact(r) => json!({ "exact": r.to_string() }),
            DimBound::Approx(x) => json!({ "approx": x }),
        }
    }
}

impl fmt::Display for DimBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimBound::Exact(r) => write!(f, "{r}"),
            DimBound::Approx(x) => write!(f, "~{x}"),
        }
    }
}

/// The exponent `e` with `x = k^e`, if there is one.
fn exact_log(k: u32, x: &BigRational) -> Option<i64> {
    let e = floor_log(k, x);
    (k_pow(k, e) == *x).then_some(e)
}

pub fn dim_lower_bound(alpha: &BigRational, beta: &BigRational, m: usize, n: usize, k: u32) -> Result<DimBound> {
    check_unit_interval("alpha", alpha)?;
    let pack = packing_count(beta, m, n, k)?;
    let log_n = pack.max_exponent();
    let ab = alpha * beta;
    Ok(match exact_log(k, &ab) {
        Some(e) => DimBound::Exact(BigRational::new(log_n.into(), (-e).into())),
        None => {
            let l = ab.to_f64().unwrap_or(0.0).ln() / (k as f64).ln();
            DimBound::Approx(log_n as f64 / -l)
        }
    })
}

/// `0.b_1 b_2 ...` in base `base`.
pub fn digit_expansion(base: u64, branches: &[u64]) -> Result<BigRational> {
    if base == 0 {
        return Err(Error::InvalidArgument("base must be positive".into()));
    }
    let b = BigInt::from(base);
    let mut value = BigRational::zero();
    let mut scale = BigRational::one();
    for &d in branches {
        if d >= base {
            return Err(Error::BranchOutOfRange { index: d, base });
        }
        scale /= &b;
        value += &scale * BigInt::from(d);
    }
    Ok(value)
}

/// The tree coordinate of a play: one base-`base` digit per White move.
pub fn digit_map(t: &GameTranscript, labels: &[u64], base: u64) -> Result<BigRational> {
    let depth = t.len() / 2;
    if labels.len() < depth {
        return Err(Error::InvalidArgument(format!("{} branch labels for {depth} White moves", labels.len())));
    }
    digit_expansion(base, &labels[..depth])
}

#[derive(Clone, Debug)]
pub struct CoverEntry {
    pub ball: FormalBall,
    /// Largest `j` with `(αβ)^j >= 2ρ`.
    pub j_l: i64,
}

impl CoverEntry {
    pub fn new(ball: FormalBall, params: &GameParams) -> Self {
        let gamma = params.alpha() * params.beta();
        let target = ball.radius() * BigInt::from(2);
        let mut j = 0i64;
        let mut g = BigRational::one();
        if g >= target {
            loop {
                let next = &g * &gamma;
                if next < target {
                    break;
                }
                g = next;
                j += 1;
            }
        } else {
            while g < target {
                g /= &gamma;
                j -= 1;
            }
        }
        CoverEntry { ball, j_l: j }
    }
}

/// `Σ ρ^s` over a cover. Radii that are powers of `k` are kept as exact exponents.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SLength {
    /// `k^e` terms with their multiplicities.
    pub powers: BTreeMap<BigRational, u64>,
    /// Exact sum for other radii when `s` is an integer.
    pub rational: BigRational,
    /// Sum for other radii when `s` is not an integer.
    pub approx: f64,
}

impl SLength {
    /// Exact value when every term is rational.
    pub fn exact(&self, k: u32) -> Option<BigRational> {
        if self.approx != 0.0 {
            return None;
        }
        let mut sum = self.rational.clone();
        for (e, c) in &self.powers {
            if !e.is_integer() {
                return None;
            }
            sum += k_pow(k, e.to_integer().to_i64()?) * BigInt::from(*c);
        }
        Some(sum)
    }

    pub fn to_f64(&self, k: u32) -> f64 {
        let lk = (k as f64).ln();
        let powers: f64 =
            self.powers.iter().map(|(e, c)| *c as f64 * (e.to_f64().unwrap_or(f64::NAN) * lk).exp()).sum();
        powers + self.rational.to_f64().unwrap_or(f64::NAN) + self.approx
    }

    pub fn to_json(&self, k: u32) -> Value {
        let powers: Vec<Value> =
            self.powers.iter().map(|(e, c)| json!({ "exponent": e.to_string(), "count": c })).collect();
        json!({
            "powers": powers,
            "exact": self.exact(k).map(|x| x.to_string()),
            "value": self.to_f64(k),
        })
    }
}

pub fn cover_s_length(cover: &[CoverEntry], s: &BigRational) -> Result<SLength> {
    if s.is_negative() {
        return Err(Error::InvalidArgument(format!("s must be non-negative, got {s}")));
    }
    let mut out = SLength::default();
    for entry in cover {
        let rho = entry.ball.radius();
        let k = entry.ball.spec().k();
        match exact_log(k, rho) {
            Some(f) => *out.powers.entry(s * BigInt::from(f)).or_insert(0) += 1,
            None if s.is_integer() => {
                let p = s.to_integer().to_i32().ok_or_else(|| Error::InvalidArgument("s too large".into()))?;
                out.rational += num_traits::pow::Pow::pow(rho, p);
            }
            None => out.approx += rho.to_f64().unwrap_or(f64::NAN).powf(s.to_f64().unwrap_or(f64::NAN)),
        }
    }
    Ok(out)
}
