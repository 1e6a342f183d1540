//! White's strategy for the badly approximable target: marker balls, the two
//! inequality systems, danger sets, the gradient move rule and a practical
//! avoidance player, plus certification of the resulting limit points.
//!
//! All thresholds are powers of `R = k^r` with rational exponents, so every
//! comparison is carried out on exponents of `k`.

pub mod lemmas;
pub mod minors;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::approx::{hat_of, FracTable, SearchBudget};
use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::game::strategies::{choice_window, enumerate_replies};
use crate::game::{FormalBall, GameParams, GameTranscript, Strategy};
use crate::linalg;
use crate::magnitude::{k_pow, Magnitude};
use crate::matrix::SeriesMatrix;
use crate::poly::Poly;
use crate::series::LaurentSeries;

pub use minors::{
    ball_sup, d_v, discrete_gradient, expansion_coefficients, g_matrix, minors, phi, phi_direct, SubspaceBasis,
};

/// Which inequality pair: `q` against `Â` (k-type) or against `Â*` (h-type).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "k-type")]
    KType,
    #[serde(rename = "h-type")]
    HType,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::KType => "k-type",
            Kind::HType => "h-type",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Literal,
    Avoidance,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Mode::Literal),
            "avoidance" => Ok(Mode::Avoidance),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ceil_minus_one(x: &BigRational) -> i64 {
    let c = x.ceil().to_integer();
    i64::try_from(c).expect("exponent fits in i64") - 1
}

/// `x < k^b` for a rational exponent `b`.
fn below(x: Magnitude, b: &BigRational) -> bool {
    match x {
        Magnitude::Zero => true,
        Magnitude::Pow(e) => rat(e) < *b,
    }
}

/// Constants of the construction.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyConfig {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    /// `R = k^r`.
    pub r: u32,
    /// Bound on `‖A‖_∞` over `B_1`.
    pub sigma: Magnitude,
    pub rho1: BigRational,
    pub k4: BigRational,
    pub k5: BigRational,
    pub k6: BigRational,
    pub k7: BigRational,
    /// Where `k4..k7` came from.
    pub provenance: String,
    pub mode: Mode,
    /// Largest height exponent the avoidance player looks at.
    pub horizon: usize,
    pub budget: SearchBudget,
}

impl StrategyConfig {
    /// Defaults: `σ = 1`, `ρ_1 = 1`, avoidance mode, horizon 6 and the calibrated constants
    /// of [`lemmas::DEFAULT_CONSTANTS`].
    pub fn new(m: usize, n: usize, k: u32, r: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("m and n must be positive".into()));
        }
        if r == 0 {
            return Err(Error::InvalidArgument("R must be a k-power greater than 1".into()));
        }
        let d = lemmas::DEFAULT_CONSTANTS;
        Ok(StrategyConfig {
            m,
            n,
            k,
            r,
            sigma: Magnitude::ONE,
            rho1: BigRational::one(),
            k4: k_pow(k, d.k4),
            k5: k_pow(k, d.k5),
            k6: k_pow(k, d.k6),
            k7: k_pow(k, d.k7),
            provenance: d.provenance.to_string(),
            mode: Mode::Avoidance,
            horizon: 6,
            budget: SearchBudget::default(),
        })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_calibration(mut self, c: &lemmas::Calibration) -> Self {
        self.k4 = c.k4.clone();
        self.k5 = c.k5.clone();
        self.k6 = c.k6.last().cloned().unwrap_or_else(BigRational::one);
        self.k7 = c.k7.clone();
        self.provenance = c.provenance();
        self
    }

    pub fn big_r(&self) -> BigRational {
        k_pow(self.k, self.r as i64)
    }

    pub fn tau(&self) -> BigRational {
        BigRational::new(BigInt::from(self.m), BigInt::from(self.m + self.n))
    }

    /// `log_k δ`.
    pub fn delta_exponent(&self) -> i64 {
        let d = (self.m + self.n) as i64;
        -(self.r as i64) * self.m as i64 * d * d
    }

    /// `log_k δ*`.
    pub fn delta_star_exponent(&self) -> i64 {
        let d = (self.m + self.n) as i64;
        -(self.r as i64) * self.n as i64 * d * d
    }

    /// Strict upper bound for `log_k` of the height in the first inequality.
    pub fn height_exponent(&self, kind: Kind, i: usize) -> BigRational {
        let r = rat(self.r as i64);
        match kind {
            Kind::KType => rat(self.delta_exponent()) + r * rat(self.n as i64) * (self.tau() + rat(i as i64)),
            Kind::HType => rat(self.delta_star_exponent()) + r * rat(self.m as i64) * rat(1 + i as i64),
        }
    }

    /// Strict upper bound for `log_k` of the linear forms in the second inequality.
    pub fn bound_exponent(&self, kind: Kind, i: usize) -> BigRational {
        let r = rat(self.r as i64);
        let (m, n) = (rat(self.m as i64), rat(self.n as i64));
        match kind {
            Kind::KType => rat(self.delta_exponent()) + r * (-m * (self.tau() + rat(i as i64)) - n),
            Kind::HType => rat(self.delta_star_exponent()) + r * (-n * rat(1 + i as i64) - m),
        }
    }

    /// Largest admissible height exponent at level `i`, if any.
    pub fn max_height(&self, kind: Kind, i: usize) -> Option<usize> {
        usize::try_from(ceil_minus_one(&self.height_exponent(kind, i))).ok()
    }

    /// Smallest level whose height window reaches `h`.
    pub fn level_for_height(&self, kind: Kind, h: usize) -> usize {
        (0..).find(|&i| self.max_height(kind, i).is_some_and(|top| top >= h)).expect("windows grow without bound")
    }

    /// `log_k` of the marker threshold: `R^{-(m+n)(τ+i)}` for k-type, `R^{-(m+n)(1+i)}` for h-type.
    pub fn marker_exponent(&self, kind: Kind, i: usize) -> i64 {
        let (r, m, d) = (self.r as i64, self.m as i64, (self.m + self.n) as i64);
        match kind {
            Kind::KType => -r * (m + d * i as i64),
            Kind::HType => -r * d * (1 + i as i64),
        }
    }

    /// `log_k K` for `K = δ^{m+n} R^{-n²-mn} / k`.
    pub fn k_exponent(&self) -> i64 {
        let (m, n, r) = (self.m as i64, self.n as i64, self.r as i64);
        (m + n) * self.delta_exponent() - r * (n * n + m * n) - 1
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "n": self.n,
            "k": self.k,
            "R_exponent": self.r,
            "delta_exponent": self.delta_exponent(),
            "delta_star_exponent": self.delta_star_exponent(),
            "tau": self.tau().to_string(),
            "sigma": crate::approx::mag_json(self.sigma),
            "rho1": self.rho1.to_string(),
            "K4": self.k4.to_string(),
            "K5": self.k5.to_string(),
            "K6": self.k6.to_string(),
            "K7": self.k7.to_string(),
            "constants_provenance": self.provenance,
            "mode": self.mode,
            "horizon": self.horizon,
        })
    }
}

/// Transcript indices of the marker balls `B_{k_i}` and `B_{h_i}`, level by level.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Markers {
    pub k: Vec<usize>,
    pub h: Vec<usize>,
}

impl Markers {
    /// Marker events in play order: `(index, kind to handle next, level)`. After `B_{k_i}`
    /// the h-type system at level `i` is due; after `B_{h_i}` the k-type one at `i + 1`.
    pub fn events(&self) -> Vec<(usize, Kind, usize)> {
        let mut ev: Vec<(usize, Kind, usize)> = self.k.iter().enumerate().map(|(i, &x)| (x, Kind::HType, i)).collect();
        ev.extend(self.h.iter().enumerate().map(|(i, &x)| (x, Kind::KType, i + 1)));
        ev.sort_by_key(|&(x, kind, level)| (x, level, kind == Kind::KType));
        ev
    }
}

pub fn schedule_markers(t: &GameTranscript, cfg: &StrategyConfig) -> Markers {
    let k = t.spec().k();
    let first_below = |e: i64| {
        let threshold = k_pow(k, e);
        t.black_balls().find(|(_, b)| *b.radius() < threshold).map(|(i, _)| i)
    };
    let mut markers = Markers::default();
    for (kind, out) in [(Kind::KType, &mut markers.k), (Kind::HType, &mut markers.h)] {
        let mut i = 0;
        while let Some(idx) = first_below(cfg.marker_exponent(kind, i)) {
            out.push(idx);
            i += 1;
        }
    }
    markers
}

/// `q · col_l(H)` for the columns of the relevant hat matrix.
fn hat_forms(a: &SeriesMatrix, q: &[Poly], kind: Kind) -> Vec<LaurentSeries> {
    let (h, count) = match kind {
        Kind::KType => (hat_of(a), a.cols()),
        Kind::HType => (hat_of(&a.transpose()), a.rows()),
    };
    let qs: Vec<LaurentSeries> = q.iter().map(LaurentSeries::from_poly).collect();
    (0..count)
        .map(|l| {
            let col = h.col(l);
            let mut acc = LaurentSeries::zero(a.spec());
            for (x, y) in qs.iter().zip(&col) {
                acc = &acc + &(x * y);
            }
            acc
        })
        .collect()
}

/// Whether both inequalities of `kind` hold at level `i` for `A` and `q ∈ F[X]^{m+n}`.
pub fn check_inequalities(a: &SeriesMatrix, q: &[Poly], i: usize, kind: Kind, cfg: &StrategyConfig) -> Result<bool> {
    let (m, n) = (a.rows(), a.cols());
    if q.len() != m + n {
        return Err(Error::DimensionMismatch(format!("q has {} coordinates, expected {}", q.len(), m + n)));
    }
    let lead = match kind {
        Kind::KType => &q[..m],
        Kind::HType => &q[..n],
    };
    let ht = crate::series::poly_height(lead);
    if ht.is_zero() || !below(ht, &cfg.height_exponent(kind, i)) {
        return Ok(false);
    }
    let b = cfg.bound_exponent(kind, i);
    for x in hat_forms(a, q, kind) {
        let small = match x.norm() {
            Ok(v) => below(v, &b),
            Err(e) if below(x.norm_bound(), &b) => {
                let _ = e;
                true
            }
            Err(e) => return Err(e),
        };
        if !small {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Polynomial vectors `q` of the window at some level for which the second inequality
/// holds for some `A` in a ball.
#[derive(Clone, Debug, PartialEq)]
pub struct DangerReport {
    pub level: usize,
    pub kind: Kind,
    /// Generators `(q, p)` over `F_q` of the solutions at each contributing height;
    /// `p` is the lift `-[q C]` through the centre.
    pub solutions: Vec<Vec<Poly>>,
    /// Rank of the solutions over `F_q(X)`.
    pub rank: usize,
    /// `m` for h-type, `n` for k-type.
    pub rank_bound: usize,
    /// Number of solutions `q` (saturating).
    pub count: u128,
    /// Heights that contribute solutions.
    pub heights: Vec<usize>,
    /// Whether the height window was cut off by the cap.
    pub capped: bool,
}

impl DangerReport {
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn within_bound(&self) -> bool {
        self.rank <= self.rank_bound
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "kind": self.kind,
            "rank": self.rank,
            "rank_bound": self.rank_bound,
            "count": self.count.to_string(),
            "heights": self.heights,
            "capped": self.capped,
            "solutions": self.solutions.iter()
                .map(|v| v.iter().map(|p| p.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

fn pow_sat(k: u32, e: usize) -> u128 {
    (k as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}

/// The danger set of `kind` at level `i` over `ψ(B)`.
///
/// For `A = C + E` with `‖E‖ <= k^f`, some `A` in the ball puts `q` of height `k^h`
/// below the bound `k^b` iff `‖qC + p‖ <= k^{max(f + h, ⌈b⌉ - 1)}`, so each height
/// contributes a kernel of the digit map of the centre.
pub fn danger_set(
    ball: &FormalBall,
    i: usize,
    kind: Kind,
    cfg: &StrategyConfig,
    height_cap: usize,
) -> Result<DangerReport> {
    let canon = ball.canonicalize();
    let f = canon.effective_exponent();
    let (m, n) = ball.shape();
    let system = match kind {
        Kind::KType => canon.center().clone(),
        Kind::HType => canon.center().transpose(),
    };
    let rows = system.rows();
    let rank_bound = match kind {
        Kind::KType => n,
        Kind::HType => m,
    };
    let mut report = DangerReport {
        level: i,
        kind,
        solutions: Vec::new(),
        rank: 0,
        rank_bound,
        count: 0,
        heights: Vec::new(),
        capped: false,
    };
    let Some(top) = cfg.max_height(kind, i) else { return Ok(report) };
    let hmax = top.min(height_cap);
    report.capped = hmax < top;
    cfg.budget.check(ball.spec().k(), rows, hmax)?;
    let sb = ceil_minus_one(&cfg.bound_exponent(kind, i));
    let table = FracTable::new(&system, hmax);
    let k = ball.spec().k();
    for h in 0..=hmax {
        let t = (f + h as i64).max(sb);
        let (basis, dim_lower) = if t >= 0 {
            let all = rows * (h + 1);
            let basis: Vec<Vec<u8>> = (0..all)
                .map(|c| {
                    let mut v = vec![0u8; all];
                    v[c] = 1;
                    v
                })
                .collect();
            (basis, rows * h)
        } else {
            let s = (-t - 1) as usize;
            let lower = if h == 0 { 0 } else { table.kernel(h - 1, s).len() };
            (table.kernel(h, s), lower)
        };
        let polys: Vec<Vec<Poly>> = basis.iter().map(|v| table.to_polys(v, h)).collect();
        let reaches = polys.iter().any(|q| q.iter().filter_map(|p| p.degree()).max() == Some(h));
        if !reaches {
            continue;
        }
        report.heights.push(h);
        report.count = report.count.saturating_add(pow_sat(k, basis.len()) - pow_sat(k, dim_lower));
        for q in polys {
            let qs: Vec<LaurentSeries> = q.iter().map(LaurentSeries::from_poly).collect();
            let mut full = q;
            for x in system.left_mul(&qs)? {
                full.push(-&x.polynomial_part()?);
            }
            report.solutions.push(full);
        }
    }
    report.rank = linalg::poly_rank(&report.solutions);
    Ok(report)
}

/// Ordered score of a candidate centre: the smallest margins `log_k D(h) - b` over
/// both kinds and all heights up to the horizon, pessimistic first. `None` is `-∞`.
pub type Score = (Option<BigRational>, Option<BigRational>);

fn margin(d: Magnitude, b: &BigRational) -> Option<BigRational> {
    d.exponent().map(|e| rat(e) - b)
}

/// Score of a centre whose digits below `known_below` are still open.
pub fn score_center(center: &SeriesMatrix, known_below: i64, cfg: &StrategyConfig) -> Score {
    let truncated = center.truncate(known_below);
    let mut lo: Option<Option<BigRational>> = None;
    let mut hi: Option<Option<BigRational>> = None;
    for kind in [Kind::KType, Kind::HType] {
        let system = match kind {
            Kind::KType => truncated.clone(),
            Kind::HType => truncated.transpose(),
        };
        let table = FracTable::new(&system, cfg.horizon);
        for h in 0..=cfg.horizon {
            let b = cfg.bound_exponent(kind, cfg.level_for_height(kind, h));
            let (d, _) = table.min_dist(h);
            let (l, u) = (margin(d.lower, &b), margin(d.upper, &b));
            lo = Some(match lo {
                Some(x) if x <= l => x,
                _ => l,
            });
            hi = Some(match hi {
                Some(x) if x <= u => x,
                _ => u,
            });
        }
    }
    (lo.flatten(), hi.flatten())
}

/// Candidate replies on the binding window, scored; `None` when no digit binds.
fn scored_replies(t: &GameTranscript, cfg: &StrategyConfig) -> Result<Option<Vec<(FormalBall, Score)>>> {
    let ball = t.last();
    let Some(window) = choice_window(ball, t.next_ratio(), t.following_ratio()) else {
        return Ok(None);
    };
    let replies = enumerate_replies(ball, t.next_ratio(), window, &cfg.budget)?;
    Ok(Some(
        replies
            .into_iter()
            .map(|r| {
                let s = score_center(r.center(), window.0, cfg);
                (r, s)
            })
            .collect(),
    ))
}

/// `t_0 >= 1` minimal with `(αβ)^{t_0} <= γ/2`.
pub fn hold_rounds(params: &GameParams) -> usize {
    let gamma = params.gamma();
    if gamma <= BigRational::zero() {
        return 1;
    }
    let ab = params.alpha() * params.beta();
    let half = gamma / rat(2);
    let mut p = ab.clone();
    let mut t0 = 1;
    while p > half {
        p = &p * &ab;
        t0 += 1;
    }
    t0
}

#[derive(Clone, Debug, PartialEq)]
struct Anchor {
    gradient: Vec<LaurentSeries>,
    rounds_left: usize,
}

/// One White move together with why it was chosen.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoveNote {
    pub index: usize,
    pub rule: &'static str,
}

pub struct WhiteStrategy {
    cfg: StrategyConfig,
    anchor: Option<Anchor>,
    events_seen: usize,
    notes: Vec<MoveNote>,
}

impl WhiteStrategy {
    pub fn new(cfg: StrategyConfig) -> Self {
        WhiteStrategy { cfg, anchor: None, events_seen: 0, notes: Vec::new() }
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.cfg
    }

    /// The rule applied at each White move so far.
    pub fn notes(&self) -> &[MoveNote] {
        &self.notes
    }

    fn note(&mut self, t: &GameTranscript, rule: &'static str) {
        self.notes.push(MoveNote { index: t.len(), rule });
    }

    fn danger_free(&self, ball: &FormalBall) -> Result<bool> {
        for kind in [Kind::KType, Kind::HType] {
            for level in 0..=self.cfg.level_for_height(kind, self.cfg.horizon) {
                if !danger_set(ball, level, kind, &self.cfg, self.cfg.horizon)?.is_empty() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn avoid(&mut self, t: &GameTranscript) -> Result<FormalBall> {
        let ball = t.last();
        if self.danger_free(ball)? {
            self.note(t, "shrink");
            return Ok(ball.shrink(t.next_ratio()));
        }
        let Some(scored) = scored_replies(t, &self.cfg)? else {
            self.note(t, "shrink");
            return Ok(ball.shrink(t.next_ratio()));
        };
        let mut best: Option<(FormalBall, Score)> = None;
        for (r, s) in scored {
            if best.as_ref().is_none_or(|(_, b)| s > *b) {
                best = Some((r, s));
            }
        }
        self.note(t, "avoid");
        Ok(best.expect("at least one reply").0)
    }

    /// Recompute the gradient anchor when a new marker ball has appeared.
    fn refresh_anchor(&mut self, t: &GameTranscript) -> Result<()> {
        let events = schedule_markers(t, &self.cfg).events();
        if events.len() <= self.events_seen {
            return Ok(());
        }
        self.events_seen = events.len();
        let (index, kind, level) = *events.last().expect("new event");
        self.anchor = None;
        let report = danger_set(&t.moves()[index], level, kind, &self.cfg, self.cfg.horizon)?;
        let basis = SubspaceBasis::from_generators(&report.solutions)?;
        let cols = match kind {
            Kind::HType => self.cfg.m,
            Kind::KType => self.cfg.n,
        };
        let v = basis.len();
        if v == 0 || v > cols {
            return Ok(());
        }
        let gradient = discrete_gradient(t.last().center(), &basis, v, kind)?;
        if gradient.iter().all(|g| g.is_zero()) {
            return Ok(());
        }
        self.anchor = Some(Anchor { gradient, rounds_left: hold_rounds(t.params()) });
        Ok(())
    }

    fn literal(&mut self, t: &GameTranscript) -> Result<FormalBall> {
        self.refresh_anchor(t)?;
        let Some(anchor) = self.anchor.as_mut().filter(|a| a.rounds_left > 0) else {
            return self.avoid(t);
        };
        anchor.rounds_left -= 1;
        let ball = t.last();
        let hi = crate::magnitude::floor_log(t.spec().k(), &((BigRational::one() - t.next_ratio()) * ball.radius()));
        let mut best = 0;
        let mut best_norm = Magnitude::Zero;
        for (idx, g) in anchor.gradient.iter().enumerate() {
            let nrm = g.norm()?;
            if nrm > best_norm {
                best = idx;
                best_norm = nrm;
            }
        }
        let (_, n) = ball.shape();
        let step = LaurentSeries::monomial(t.spec(), FqElem::ONE, hi);
        let center = ball.center().add_at(best / n, best % n, &step);
        self.note(t, "gradient");
        FormalBall::new(center, ball.radius() * t.next_ratio())
    }
}

impl Strategy for WhiteStrategy {
    fn name(&self) -> &str {
        match self.cfg.mode {
            Mode::Literal => "white-literal",
            Mode::Avoidance => "white-avoid",
        }
    }

    fn propose(&mut self, t: &GameTranscript) -> Result<FormalBall> {
        match self.cfg.mode {
            Mode::Literal => self.literal(t),
            Mode::Avoidance => self.avoid(t),
        }
    }
}

/// Black choosing the reply with the worst avoidance score.
pub struct BlackGreedy {
    cfg: StrategyConfig,
}

impl BlackGreedy {
    pub fn new(cfg: StrategyConfig) -> Self {
        BlackGreedy { cfg }
    }
}

impl Strategy for BlackGreedy {
    fn name(&self) -> &str {
        "black-greedy"
    }

    fn propose(&mut self, t: &GameTranscript) -> Result<FormalBall> {
        let Some(scored) = scored_replies(t, &self.cfg)? else {
            return Ok(t.last().shrink(t.next_ratio()));
        };
        let mut best: Option<(FormalBall, Score)> = None;
        for (r, s) in scored {
            if best.as_ref().is_none_or(|(_, b)| s < *b) {
                best = Some((r, s));
            }
        }
        Ok(best.expect("at least one reply").0)
    }
}

/// Certified `⟨qA⟩^n ‖q‖^m > K` for all `0 < ‖q‖ <= k^cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub k_exponent: i64,
    pub cap_exponent: usize,
    /// `min_h (m h + n log_k D(h)) - log_k K`, using certified lower bounds.
    pub min_margin_exponent: i64,
    /// Number of nonzero `q` covered (saturating).
    pub witnesses_checked: u64,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        json!({
            "K_exponent": self.k_exponent,
            "cap_exponent": self.cap_exponent,
            "min_margin_exponent": self.min_margin_exponent,
            "witnesses_checked": self.witnesses_checked,
        })
    }
}

pub fn certify_bad(point: &SeriesMatrix, cfg: &StrategyConfig, height_cap: Magnitude) -> Result<Certificate> {
    let cap = match height_cap {
        Magnitude::Pow(e) if e >= 0 => e as usize,
        _ => return Err(Error::InvalidArgument("height cap must be at least 1".into())),
    };
    let (m, n) = (point.rows() as i64, point.cols() as i64);
    let kappa = cfg.k_exponent();
    let table = FracTable::new(point, cap);
    let mut min_margin: Option<i64> = None;
    let mut undecided = None;
    for h in 0..=cap {
        let (d, q) = table.min_dist(h);
        let upper = d.upper.exponent().map(|e| m * h as i64 + n * e - kappa);
        if upper.is_none_or(|u| u <= 0) {
            return Err(Error::CounterexampleFound { q: q.iter().map(|p| p.to_string()).collect() });
        }
        match d.lower.exponent().map(|e| m * h as i64 + n * e - kappa) {
            Some(l) if l > 0 => min_margin = Some(min_margin.map_or(l, |x| x.min(l))),
            _ => undecided = undecided.or(Some(h)),
        }
    }
    if let Some(h) = undecided {
        return Err(Error::PrecisionExhausted(format!(
            "distances at height k^{h} are not determined by the known digits"
        )));
    }
    let k = point.spec().k();
    let total = (k as u128)
        .checked_pow((point.rows() * (cap + 1)) as u32)
        .map_or(u64::MAX, |x| u64::try_from(x - 1).unwrap_or(u64::MAX));
    Ok(Certificate {
        k_exponent: kappa,
        cap_exponent: cap,
        min_margin_exponent: min_margin.expect("at least one height"),
        witnesses_checked: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::game::{play, BlackRandom, GameParams, StopRule};
    use crate::parse::parse_poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn polys(s: &FieldSpec, v: &[&str]) -> Vec<Poly> {
        v.iter().map(|t| parse_poly(t, s).unwrap()).collect()
    }

    #[test]
    fn derived_exponents() {
        let cfg = StrategyConfig::new(1, 1, 2, 2).unwrap();
        assert_eq!(cfg.delta_exponent(), -8);
        assert_eq!(cfg.k_exponent(), -21);
        // Level 0 of the k-type window is empty; h = 0 first appears at level 4.
        assert_eq!(cfg.max_height(Kind::KType, 0), None);
        assert_eq!(cfg.level_for_height(Kind::KType, 0), 4);
        assert_eq!(cfg.bound_exponent(Kind::KType, 4), rat(-19));
    }

    #[test]
    fn markers_for_half_half() {
        let s = FieldSpec::prime(2).unwrap();
        let params = GameParams::new(q(1, 2), q(1, 2), 2).unwrap();
        let mut cfg = StrategyConfig::new(1, 1, 2, 1).unwrap();
        cfg.horizon = 2;
        let t = play(
            &mut crate::game::ShrinkInPlace,
            &mut crate::game::ShrinkInPlace,
            FormalBall::unit(&s, 1, 1),
            &params,
            &StopRule::rounds(3),
        )
        .unwrap();
        let mk = schedule_markers(&t, &cfg);
        // Black radii 1, 1/4, 1/16, 1/64: k_0 is the first below 1/2.
        assert_eq!(mk.k[0], 2);
        assert_eq!(mk.h[0], 4);
        let short = play(
            &mut crate::game::ShrinkInPlace,
            &mut crate::game::ShrinkInPlace,
            FormalBall::unit(&s, 1, 1),
            &params,
            &StopRule::Moves(0),
        )
        .unwrap();
        assert!(schedule_markers(&short, &cfg).k.is_empty());
    }

    #[test]
    fn marker_events_are_ordered() {
        let s = FieldSpec::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = [q(1, 2), q(1, 4), q(1, 8)][rng.gen_range(0..3)].clone();
            let b = [q(1, 2), q(1, 4)][rng.gen_range(0..2)].clone();
            let params = GameParams::new(a, b, 2).unwrap();
            let cfg = StrategyConfig::new(1, 1, 2, rng.gen_range(1..4)).unwrap();
            let t = play(
                &mut crate::game::ShrinkInPlace,
                &mut BlackRandom::new(rng.gen()),
                FormalBall::unit(&s, 1, 1),
                &params,
                &StopRule::rounds(8),
            )
            .unwrap();
            let mk = schedule_markers(&t, &cfg);
            let mut chain = Vec::new();
            for i in 0..mk.k.len() {
                chain.push(mk.k[i]);
                if let Some(&h) = mk.h.get(i) {
                    chain.push(h);
                }
            }
            assert!(chain.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn inequality_examples() {
        let s = FieldSpec::prime(2).unwrap();
        let cfg = StrategyConfig::new(1, 1, 2, 1).unwrap();
        let a = SeriesMatrix::parse_flat(&s, "X^-1").unwrap();
        assert!(!check_inequalities(&a, &polys(&s, &["0", "0"]), 5, Kind::KType, &cfg).unwrap());
        // Level 0: nothing is small enough.
        assert!(!check_inequalities(&a, &polys(&s, &["1", "0"]), 0, Kind::KType, &cfg).unwrap());
        // A = 1/(X + 1): q = X + 1, p = -1 makes qA + p = 0 exactly.
        let planted = SeriesMatrix::new(
            &s,
            1,
            1,
            vec![LaurentSeries::rational(&Poly::one(&s), &parse_poly("X + 1", &s).unwrap()).unwrap()],
        )
        .unwrap();
        let level = cfg.level_for_height(Kind::KType, 1);
        assert!(check_inequalities(&planted, &polys(&s, &["X + 1", "1"]), level, Kind::KType, &cfg).unwrap());
        assert!(!check_inequalities(&a, &polys(&s, &["X + 1", "1"]), level, Kind::KType, &cfg).unwrap());
    }

    #[test]
    fn danger_sets_small_cases() {
        let s = FieldSpec::prime(2).unwrap();
        let cfg = StrategyConfig::new(1, 1, 2, 1).unwrap();
        let ball = FormalBall::unit(&s, 1, 1);
        assert!(danger_set(&ball, 0, Kind::KType, &cfg, 8).unwrap().is_empty());
        // A tiny ball around the rational 1/(X+1) contains solutions of every level
        // at which the height window admits X + 1.
        let c = LaurentSeries::rational(&Poly::one(&s), &parse_poly("X + 1", &s).unwrap()).unwrap();
        let center = SeriesMatrix::new(&s, 1, 1, vec![c.round_at(-40).unwrap()]).unwrap();
        let small = FormalBall::new(center, k_pow(2, -40)).unwrap();
        let level = cfg.level_for_height(Kind::KType, 1);
        let rep = danger_set(&small, level, Kind::KType, &cfg, 8).unwrap();
        assert!(!rep.is_empty());
        assert_eq!(rep.rank, 1);
        for sol in &rep.solutions {
            assert!(check_inequalities(small.center(), sol, level, Kind::KType, &cfg).unwrap());
        }
        // Shrinking never adds solutions.
        let smaller = FormalBall::new(small.center().clone(), k_pow(2, -41)).unwrap();
        assert!(danger_set(&smaller, level, Kind::KType, &cfg, 8).unwrap().count <= rep.count);
    }

    #[test]
    fn danger_count_matches_enumeration() {
        // Oracle: for every q of small height, decide membership directly from
        // ‖qC + p‖ with p the nearest polynomial and the ball's slack k^{f+h}.
        let s = FieldSpec::prime(2).unwrap();
        let cfg = StrategyConfig::new(1, 1, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let c = LaurentSeries::random_exact(&s, &mut rng, -1, -30);
            let f = -rng.gen_range(12..26);
            let ball = FormalBall::new(SeriesMatrix::new(&s, 1, 1, vec![c]).unwrap(), k_pow(2, f)).unwrap();
            let canon = ball.canonicalize();
            for level in 0..12 {
                let rep = danger_set(&ball, level, Kind::KType, &cfg, 6).unwrap();
                let Some(top) = cfg.max_height(Kind::KType, level) else { continue };
                let top = top.min(6);
                let b = cfg.bound_exponent(Kind::KType, level);
                let mut count = 0u128;
                for qp in Poly::all_below_degree(&s, top + 1).filter(|p| !p.is_zero()) {
                    let h = qp.degree().unwrap() as i64;
                    let x = &LaurentSeries::from_poly(&qp) * canon.center().get(0, 0);
                    let d = x.fractional_part().norm().unwrap();
                    let slack = Magnitude::Pow(f + h);
                    if d <= slack || below(d, &b) {
                        count += 1;
                    }
                }
                assert_eq!(rep.count, count);
            }
        }
    }

    #[test]
    fn literal_move_keeps_gradient_distance() {
        let s = FieldSpec::prime(2).unwrap();
        let params = GameParams::new(q(1, 4), q(1, 2), 2).unwrap();
        let ball = FormalBall::new(SeriesMatrix::parse_flat(&s, "X^-1 + X^-4").unwrap(), q(1, 8)).unwrap();
        let hi = crate::magnitude::floor_log(2, &((BigRational::one() - params.alpha()) * ball.radius()));
        let step = LaurentSeries::monomial(&s, FqElem::ONE, hi);
        let d = FormalBall::new(ball.center().add_at(0, 0, &step), ball.radius() * params.alpha()).unwrap();
        assert!(crate::game::validate_move(&ball, &d, params.alpha()));
        // ‖C - D‖ >= k^-1 (1 - α) ρ.
        let dist = Magnitude::Pow(hi).to_rational(2);
        assert!(dist >= (BigRational::one() - params.alpha()) * ball.radius() / rat(2));
        assert_eq!(hold_rounds(&params), 1);
    }

    #[test]
    fn avoidance_and_literal_games_are_legal() {
        let s = FieldSpec::prime(2).unwrap();
        let params = GameParams::new(q(1, 4), q(1, 2), 2).unwrap();
        for mode in [Mode::Avoidance, Mode::Literal] {
            let cfg = StrategyConfig::new(1, 1, 2, 2).unwrap().with_mode(mode);
            let mut white = WhiteStrategy::new(cfg.clone());
            let t =
                play(&mut white, &mut BlackRandom::new(1), FormalBall::unit(&s, 1, 1), &params, &StopRule::rounds(8))
                    .unwrap();
            assert!(t.forfeit().is_none(), "{mode:?}");
            let mut greedy = BlackGreedy::new(cfg);
            let t = play(&mut white, &mut greedy, FormalBall::unit(&s, 1, 1), &params, &StopRule::rounds(4)).unwrap();
            assert!(t.forfeit().is_none());
        }
    }

    #[test]
    fn certificates() {
        let s = FieldSpec::prime(2).unwrap();
        let cfg = StrategyConfig::new(1, 1, 2, 2).unwrap();
        // x = X^-1 + X^-3 + ... has partial quotients of degree 1: K̂ = k^-1.
        let good = SeriesMatrix::new(
            &s,
            1,
            1,
            vec![LaurentSeries::rational(&parse_poly("X", &s).unwrap(), &parse_poly("X^2 + 1", &s).unwrap()).unwrap()],
        )
        .unwrap();
        match certify_bad(&good, &cfg, Magnitude::Pow(1)) {
            Ok(c) => assert_eq!(c.k_exponent, -21),
            Err(e) => panic!("{e}"),
        }
        assert!(matches!(certify_bad(&good, &cfg, Magnitude::Pow(4)), Err(Error::CounterexampleFound { .. })));
        // A truncated point without enough digits cannot be certified.
        let short = good.truncate(-3);
        assert!(matches!(certify_bad(&short, &cfg, Magnitude::Pow(2)), Err(Error::PrecisionExhausted(_))));
    }
}
