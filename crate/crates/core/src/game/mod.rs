//! The Schmidt `(α, β)`-game on `L^{mn}`.
//!
//! Balls are formal: a centre and an exact rational radius. Containment is the
//! formal relation `ρ_in + ‖c_in - c_out‖ <= ρ_out`, which is strictly stronger than
//! containment of the underlying sets.

pub mod strategies;

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::magnitude::{floor_log, Magnitude};
use crate::matrix::SeriesMatrix;
use crate::parse::{format_field, format_series, parse_field};

pub use strategies::{BlackBranch, BlackRandom, ReaderStrategy, ShrinkInPlace};

#[derive(Clone, PartialEq, Eq)]
pub struct FormalBall {
    center: SeriesMatrix,
    radius: BigRational,
}

impl FormalBall {
    pub fn new(center: SeriesMatrix, radius: BigRational) -> Result<Self> {
        if radius <= BigRational::zero() {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        if !center.entries().iter().all(|x| x.is_exact()) {
            return Err(Error::InvalidArgument("ball centres must be exact".into()));
        }
        Ok(FormalBall { center, radius })
    }

    /// Centre 0, radius 1.
    pub fn unit(spec: &FieldSpec, m: usize, n: usize) -> Self {
        FormalBall { center: SeriesMatrix::zeros(spec, m, n), radius: BigRational::one() }
    }

    pub fn center(&self) -> &SeriesMatrix {
        &self.center
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn spec(&self) -> &FieldSpec {
        self.center.spec()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.center.rows(), self.center.cols())
    }

    /// `f` with `k^f <= ρ < k^{f+1}`: the set `ψ(B)` is the ball of radius `k^f`.
    pub fn effective_exponent(&self) -> i64 {
        floor_log(self.spec().k(), &self.radius)
    }

    /// Radius `k^f` and centre rounded to the exponents above `f`.
    pub fn canonicalize(&self) -> FormalBall {
        let f = self.effective_exponent();
        let center = self.center.map(|x| x.round_at(f + 1).expect("exact centre"));
        FormalBall { center, radius: Magnitude::Pow(f).to_rational(self.spec().k()) }
    }

    /// Whether `x ∈ ψ(B)`.
    pub fn contains_point(&self, x: &SeriesMatrix) -> Result<bool> {
        let d = x.distance(&self.center)?;
        Ok(d <= Magnitude::Pow(self.effective_exponent()))
    }

    /// The same centre with the radius multiplied by `ratio`.
    pub fn shrink(&self, ratio: &BigRational) -> FormalBall {
        FormalBall { center: self.center.clone(), radius: &self.radius * ratio }
    }

    pub fn to_json(&self, player: Player) -> Value {
        let center: Vec<Vec<String>> =
            (0..self.center.rows()).map(|i| self.center.row(i).iter().map(format_series).collect()).collect();
        json!({ "player": player, "center": center, "radius": self.radius.to_string() })
    }
}

impl fmt::Debug for FormalBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ball({}, {})", self.center, self.radius)
    }
}

/// `ρ_in + ‖c_in - c_out‖ <= ρ_out`.
pub fn formal_contains(inner: &FormalBall, outer: &FormalBall) -> Result<bool> {
    if inner.shape() != outer.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", inner.shape(), outer.shape())));
    }
    let d = inner.center.distance(&outer.center)?.to_rational(inner.spec().k());
    Ok(&inner.radius + d <= outer.radius)
}

/// Whether `next ∈ prev^ratio`.
pub fn validate_move(prev: &FormalBall, next: &FormalBall, ratio: &BigRational) -> bool {
    next.radius == &prev.radius * ratio && formal_contains(next, prev).unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameParams {
    alpha: BigRational,
    beta: BigRational,
    k: u32,
}

impl GameParams {
    pub fn new(alpha: BigRational, beta: BigRational, k: u32) -> Result<Self> {
        let unit = |x: &BigRational| x > &BigRational::zero() && x < &BigRational::one();
        if !unit(&alpha) || !unit(&beta) {
            return Err(Error::InvalidArgument(format!("need 0 < α, β < 1, got α = {alpha}, β = {beta}")));
        }
        Ok(GameParams { alpha, beta, k })
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `γ = k^-1 + αβ - (k^-1 + 1)α`.
    pub fn gamma(&self) -> BigRational {
        let inv_k = BigRational::new(1.into(), self.k.into());
        &inv_k + &self.alpha * &self.beta - (&inv_k + BigRational::one()) * &self.alpha
    }

    /// Ratio applied by the player who makes move number `index` (`0` is `B_1`).
    pub fn ratio_for(&self, index: usize) -> &BigRational {
        if index % 2 == 1 {
            &self.alpha
        } else {
            &self.beta
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Black,
    White,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Black => "black",
            Player::White => "white",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IllegalMove {
    pub player: Player,
    /// Position the move would have had in the transcript.
    pub index: usize,
    pub proposal: FormalBall,
}

/// `B_1, W_1, B_2, W_2, ...`; every stored move is legal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTranscript {
    params: GameParams,
    moves: Vec<FormalBall>,
    forfeit: Option<IllegalMove>,
}

impl GameTranscript {
    pub fn new(params: GameParams, b1: FormalBall) -> Result<Self> {
        if b1.spec().k() != params.k {
            return Err(Error::FieldMismatch);
        }
        Ok(GameTranscript { params, moves: vec![b1], forfeit: None })
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn spec(&self) -> &FieldSpec {
        self.moves[0].spec()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.moves[0].shape()
    }

    pub fn moves(&self) -> &[FormalBall] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn last(&self) -> &FormalBall {
        self.moves.last().expect("transcript starts with B_1")
    }

    pub fn player_of(index: usize) -> Player {
        if index % 2 == 0 {
            Player::Black
        } else {
            Player::White
        }
    }

    pub fn to_move(&self) -> Player {
        Self::player_of(self.moves.len())
    }

    /// Ratio of the move about to be made.
    pub fn next_ratio(&self) -> &BigRational {
        self.params.ratio_for(self.moves.len())
    }

    /// Ratio of the move after that.
    pub fn following_ratio(&self) -> &BigRational {
        self.params.ratio_for(self.moves.len() + 1)
    }

    /// Black's balls `B_1, B_2, ...` with their transcript indices.
    pub fn black_balls(&self) -> impl Iterator<Item = (usize, &FormalBall)> {
        self.moves.iter().enumerate().step_by(2)
    }

    pub fn forfeit(&self) -> Option<&IllegalMove> {
        self.forfeit.as_ref()
    }

    /// Append a proposal; an illegal one ends the game as a forfeit. Returns legality.
    pub fn push(&mut self, proposal: FormalBall) -> bool {
        if self.forfeit.is_some() {
            return false;
        }
        if validate_move(self.last(), &proposal, self.next_ratio()) {
            self.moves.push(proposal);
            true
        } else {
            self.forfeit = Some(IllegalMove { player: self.to_move(), index: self.moves.len(), proposal });
            false
        }
    }

    /// JSON lines: a header, then one object per move, then the forfeit if any.
    pub fn to_jsonl(&self) -> String {
        let (m, n) = self.shape();
        let mut out = json!({
            "field": format_field(self.spec()),
            "alpha": self.params.alpha.to_string(),
            "beta": self.params.beta.to_string(),
            "m": m,
            "n": n,
        })
        .to_string();
        out.push('\n');
        for (i, b) in self.moves.iter().enumerate() {
            out.push_str(&b.to_json(Self::player_of(i)).to_string());
            out.push('\n');
        }
        if let Some(f) = &self.forfeit {
            let mut v = f.proposal.to_json(f.player);
            v["illegal"] = json!(f.index);
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    /// Replay a JSON-lines transcript, re-validating every move.
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |msg: String| Error::InvalidArgument(format!("transcript: {msg}"));
        let header: Value =
            serde_json::from_str(lines.next().ok_or_else(|| bad("empty".into()))?).map_err(|e| bad(e.to_string()))?;
        let text_field = |v: &Value, key: &str| -> Result<String> {
            v[key].as_str().map(str::to_string).ok_or_else(|| bad(format!("missing '{key}'")))
        };
        let spec = parse_field(&text_field(&header, "field")?)?;
        let rat = |s: String| BigRational::from_str(&s).map_err(|e| bad(format!("{s}: {e}")));
        let params =
            GameParams::new(rat(text_field(&header, "alpha")?)?, rat(text_field(&header, "beta")?)?, spec.k())?;
        let mut transcript: Option<GameTranscript> = None;
        for line in lines {
            let v: Value = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            let rows: Vec<Vec<String>> = serde_json::from_value(v["center"].clone()).map_err(|e| bad(e.to_string()))?;
            let ball = FormalBall::new(SeriesMatrix::parse(&spec, &rows)?, rat(text_field(&v, "radius")?)?)?;
            match transcript.as_mut() {
                None => transcript = Some(GameTranscript::new(params.clone(), ball)?),
                Some(t) => {
                    let legal = t.push(ball);
                    if !legal && v.get("illegal").is_none() {
                        return Err(bad(format!("move {} is illegal", t.len())));
                    }
                }
            }
        }
        transcript.ok_or_else(|| bad("no moves".into()))
    }
}

/// A player: a total function from the transcript to a proposed ball.
pub trait Strategy {
    fn name(&self) -> &str;
    fn propose(&mut self, t: &GameTranscript) -> Result<FormalBall>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Stop once the last ball has radius below the threshold.
    Radius(BigRational),
    /// Stop after this many moves following `B_1`.
    Moves(usize),
}

impl StopRule {
    /// `rounds` full rounds: one White and one Black move each.
    pub fn rounds(rounds: usize) -> Self {
        StopRule::Moves(2 * rounds)
    }

    fn done(&self, t: &GameTranscript) -> bool {
        match self {
            StopRule::Radius(r) => t.last().radius() < r,
            StopRule::Moves(n) => t.len() > *n,
        }
    }
}

pub fn play(
    white: &mut dyn Strategy,
    black: &mut dyn Strategy,
    b1: FormalBall,
    params: &GameParams,
    stop: &StopRule,
) -> Result<GameTranscript> {
    let mut t = GameTranscript::new(params.clone(), b1)?;
    while !stop.done(&t) && t.forfeit().is_none() {
        let proposal = match t.to_move() {
            Player::White => white.propose(&t)?,
            Player::Black => black.propose(&t)?,
        };
        t.push(proposal);
    }
    Ok(t)
}

/// Moves after `B_1` needed before the last ball has radius `< k^-precision`.
pub fn moves_needed(params: &GameParams, rho1: &BigRational, precision: i64) -> usize {
    let mut rho = rho1.clone();
    let mut moves = 0;
    while floor_log(params.k, &rho) > -precision - 1 {
        moves += 1;
        rho = &rho * params.ratio_for(moves);
    }
    moves
}

/// The point of `∩ ψ(B_i)` to the digits at exponents `>= -precision`, as a truncated
/// matrix. Every returned digit is final: later balls lie within `ρ < k^-precision`.
pub fn limit_point(t: &GameTranscript, precision: i64) -> Result<SeriesMatrix> {
    let last = t.last();
    if last.effective_exponent() > -precision - 1 {
        return Err(Error::InsufficientDepth {
            required_moves: moves_needed(t.params(), t.moves()[0].radius(), precision),
        });
    }
    Ok(last.center().truncate(-precision))
}
