//! Badly approximable systems of linear forms.

pub mod cf;
pub(crate) mod frac;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::magnitude::Magnitude;
use crate::matrix::SeriesMatrix;
use crate::poly::Poly;
use crate::series::{poly_height, LaurentSeries};

pub use cf::{cf_convergents, cf_eval, cf_expand, is_bad_cf, BadCfReport, ContinuedFraction};
pub use frac::DistBound;
pub(crate) use frac::FracTable;

/// `m` linear forms in `n` variables, given by an `m x n` matrix `A`; `q` ranges over `F[X]^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFormSystem {
    m: usize,
    n: usize,
    a: SeriesMatrix,
}

impl LinearFormSystem {
    pub fn new(a: SeriesMatrix) -> Result<Self> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::DimensionMismatch("empty system".into()));
        }
        Ok(LinearFormSystem { m: a.rows(), n: a.cols(), a })
    }

    pub fn single(x: LaurentSeries) -> Self {
        let spec = x.spec().clone();
        Self::new(SeriesMatrix::new(&spec, 1, 1, vec![x]).unwrap()).unwrap()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &SeriesMatrix {
        &self.a
    }

    pub fn spec(&self) -> &FieldSpec {
        self.a.spec()
    }

    /// `qA` for a polynomial row vector `q` of length `m`.
    pub fn apply(&self, q: &[Poly]) -> Result<Vec<LaurentSeries>> {
        let v: Vec<LaurentSeries> = q.iter().map(LaurentSeries::from_poly).collect();
        self.a.left_mul(&v)
    }
}

/// The block matrices `Â = [[A, I_m], [I_n, 0]]` and `Â* = [[Aᵀ, I_n], [I_m, 0]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HatMatrices {
    pub hat: SeriesMatrix,
    pub hat_star: SeriesMatrix,
}

pub fn hat_of(a: &SeriesMatrix) -> SeriesMatrix {
    let (m, n) = (a.rows(), a.cols());
    let spec = a.spec();
    SeriesMatrix::from_fn(spec, m + n, m + n, |i, j| match (i < m, j < n) {
        (true, true) => a.get(i, j).clone(),
        (true, false) if j - n == i => LaurentSeries::one(spec),
        (false, true) if i - m == j => LaurentSeries::one(spec),
        _ => LaurentSeries::zero(spec),
    })
}

pub fn build_hat(sys: &LinearFormSystem) -> HatMatrices {
    HatMatrices { hat: hat_of(&sys.a), hat_star: hat_of(&sys.a.transpose()) }
}

/// A polynomial vector together with the quality of the approximation it gives.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxWitness {
    pub q: Vec<Poly>,
    pub height_q: Magnitude,
    /// `⟨qA⟩`, or an upper bound for it when `dist_exact` is false.
    pub dist: Magnitude,
    pub dist_exact: bool,
    /// `height_q^m * dist^n`.
    pub score: Magnitude,
}

/// Magnitudes are serialized as exponents of `k`, with `null` for zero.
pub fn mag_json(m: Magnitude) -> Value {
    match m {
        Magnitude::Zero => Value::Null,
        Magnitude::Pow(e) => json!(e),
    }
}

impl ApproxWitness {
    pub fn evaluate(sys: &LinearFormSystem, q: Vec<Poly>) -> Result<Self> {
        let qa = sys.apply(&q)?;
        let (dist, dist_exact) = frac_bound(&qa);
        let height_q = poly_height(&q);
        let score = height_q.pow(sys.m as u32) * dist.pow(sys.n as u32);
        Ok(ApproxWitness { q, height_q, dist, dist_exact, score })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "height": mag_json(self.height_q),
            "dist": mag_json(self.dist),
            "dist_exact": self.dist_exact,
            "score": mag_json(self.score),
        })
    }
}

/// `⟨v⟩` when determinable, otherwise the best upper bound (flagged `false`).
pub fn frac_bound(v: &[LaurentSeries]) -> (Magnitude, bool) {
    let mut exact_max = Magnitude::Zero;
    let mut loose_max: Option<Magnitude> = None;
    for x in v {
        let f = x.fractional_part();
        match f.norm() {
            Ok(m) => exact_max = exact_max.max(m),
            Err(_) => loose_max = Some(loose_max.map_or(f.norm_bound(), |l| l.max(f.norm_bound()))),
        }
    }
    match loose_max {
        Some(l) if l > exact_max => (l, false),
        _ => (exact_max, true),
    }
}

/// Limits on the size of the linear systems solved during searches.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Maximum number of polynomial vectors `q` covered by one search.
    pub max_candidates: u128,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_candidates: 1u128 << 100 }
    }
}

impl SearchBudget {
    pub(crate) fn check(&self, k: u32, m: usize, h: usize) -> Result<()> {
        let exp = (m * (h + 1)) as u32;
        let needed = (k as u128).checked_pow(exp).unwrap_or(u128::MAX);
        if needed > self.max_candidates {
            Err(Error::SearchBudgetExceeded { needed, budget: self.max_candidates })
        } else {
            Ok(())
        }
    }
}

fn cap_exponent(height_bound: Magnitude) -> Result<usize> {
    match height_bound {
        Magnitude::Pow(e) if e >= 0 => Ok(e as usize),
        _ => Err(Error::InvalidArgument("height bound must be at least 1".into())),
    }
}

/// `K̂(A, Q) = min {‖q‖^m ⟨qA⟩^n : q ∈ F[X]^m, 0 < ‖q‖ <= Q}` with a minimizing `q`.
///
/// With `D(h)` the least distance over heights `<= k^h`, `K̂ = min_h k^{mh} D(h)^n`;
/// every `D(h)` is obtained from kernels of the digit map rather than by enumerating `q`.
pub fn badness_constant(
    sys: &LinearFormSystem,
    height_bound: Magnitude,
    budget: SearchBudget,
) -> Result<(Magnitude, ApproxWitness)> {
    let top = cap_exponent(height_bound)?;
    budget.check(sys.spec().k(), sys.m, top)?;
    let table = FracTable::new(&sys.a, top);
    let mut best: Option<(Magnitude, Vec<Poly>)> = None;
    for h in 0..=top {
        let (d, q) = table.min_dist(h);
        let d = d.value()?;
        let term = Magnitude::Pow((sys.m * h) as i64) * d.pow(sys.n as u32);
        if best.as_ref().is_none_or(|(b, _)| term < *b) {
            best = Some((term, q));
        }
        if term == Magnitude::Zero {
            break;
        }
    }
    let (_, q) = best.expect("at least one height class");
    let w = ApproxWitness::evaluate(sys, q)?;
    Ok((w.score, w))
}

/// Exponent `e` with a `q`, `0 < ‖q‖ <= k^t`, and `⟨qA⟩ <= k^-e` for every `A`:
/// the `k^{m(t+1)}` vectors `q` map linearly to `k^{n(e-1)}` digit patterns.
pub fn dirichlet_exponent(m: usize, n: usize, t: usize) -> i64 {
    (m * (t + 1)).div_ceil(n) as i64
}

/// The offset `c₀` with `dirichlet_exponent = ⌈tm/n⌉ + c₀`.
pub fn dirichlet_c0(m: usize, n: usize, t: usize) -> i64 {
    dirichlet_exponent(m, n, t) - (m * t).div_ceil(n) as i64
}

/// Some `q` with `0 < ‖q‖ <= k^t` and `⟨qA⟩ <= k^{-dirichlet_exponent(m, n, t)}`.
pub fn dirichlet_witness(sys: &LinearFormSystem, t: usize) -> Result<ApproxWitness> {
    dirichlet_witness_with(sys, t, dirichlet_exponent(sys.m, sys.n, t))
}

/// As [`dirichlet_witness`] but aiming at `⟨qA⟩ <= k^-e` for a caller-chosen `e`.
pub fn dirichlet_witness_with(sys: &LinearFormSystem, t: usize, e: i64) -> Result<ApproxWitness> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    let table = FracTable::new(&sys.a, t);
    let s = (e - 1).max(0);
    let ker = table.kernel(t, s as usize);
    if ker.is_empty() {
        return Err(Error::WitnessNotFound);
    }
    // A kernel vector only certifies digits that were actually constrained.
    if !table.certifies(t, s as usize) {
        return Err(Error::PrecisionExhausted(format!("{s} fractional digits needed at height k^{t}")));
    }
    let mut best: Option<ApproxWitness> = None;
    for v in &ker {
        let w = ApproxWitness::evaluate(sys, table.to_polys(v, t))?;
        if best.as_ref().is_none_or(|b| (w.height_q, w.dist) < (b.height_q, b.dist)) {
            best = Some(w);
        }
    }
    let w = best.unwrap();
    if w.dist > Magnitude::Pow(-e) {
        return Err(Error::WitnessNotFound);
    }
    Ok(w)
}
