//! Basic players and the candidate-move grids shared by all strategies.

use std::io::BufRead;

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FormalBall, GameTranscript, Strategy};
use crate::approx::SearchBudget;
use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::magnitude::floor_log;
use crate::matrix::SeriesMatrix;
use crate::series::LaurentSeries;

/// Exponents `lo..=hi` of centre digits a mover may change (`hi`) and that still bind
/// the next mover (`lo`), or `None` when no digit qualifies.
pub fn choice_window(ball: &FormalBall, ratio: &BigRational, next_ratio: &BigRational) -> Option<(i64, i64)> {
    let k = ball.spec().k();
    let hi = floor_log(k, &((BigRational::one() - ratio) * ball.radius()));
    let lo = floor_log(k, &((BigRational::one() - next_ratio) * ratio * ball.radius())) + 1;
    (lo <= hi).then_some((lo, hi))
}

/// Exponents of centre digits that distinguish the `ψ`-images of legal replies.
pub fn psi_window(ball: &FormalBall, ratio: &BigRational) -> Option<(i64, i64)> {
    let k = ball.spec().k();
    let hi = floor_log(k, &((BigRational::one() - ratio) * ball.radius()));
    let lo = floor_log(k, &(ratio * ball.radius())) + 1;
    (lo <= hi).then_some((lo, hi))
}

/// Number of digit patterns on a window, if it fits in `u128`.
pub fn window_size(k: u32, entries: usize, window: (i64, i64)) -> Option<u128> {
    let digits = entries as u32 * (window.1 - window.0 + 1) as u32;
    (k as u128).checked_pow(digits)
}

/// Offset matrix whose entry `e` has `digits[e * w + d]` at exponent `hi - d`.
fn offset(ball: &FormalBall, window: (i64, i64), digits: &[u8]) -> SeriesMatrix {
    let (m, n) = ball.shape();
    let w = (window.1 - window.0 + 1) as usize;
    let spec = ball.spec();
    SeriesMatrix::from_fn(spec, m, n, |i, j| {
        let e = i * n + j;
        let terms: Vec<(i64, FqElem)> = (0..w).map(|d| (window.1 - d as i64, FqElem(digits[e * w + d]))).collect();
        LaurentSeries::from_terms(spec, &terms)
    })
}

/// The reply with centre `c + offset(digits)` and radius `ratio · ρ`.
pub fn reply(ball: &FormalBall, ratio: &BigRational, window: (i64, i64), digits: &[u8]) -> FormalBall {
    let center = ball.center().add(&offset(ball, window, digits)).expect("same shape");
    FormalBall::new(center, ball.radius() * ratio).expect("positive radius")
}

/// Digit pattern number `index` (base `k`, first digit least significant).
pub fn pattern(k: u32, len: usize, mut index: u128) -> Vec<u8> {
    (0..len)
        .map(|_| {
            let d = (index % k as u128) as u8;
            index /= k as u128;
            d
        })
        .collect()
}

/// All replies on a window, in pattern order.
pub fn enumerate_replies(
    ball: &FormalBall,
    ratio: &BigRational,
    window: (i64, i64),
    budget: &SearchBudget,
) -> Result<Vec<FormalBall>> {
    let (m, n) = ball.shape();
    let k = ball.spec().k();
    let len = m * n * (window.1 - window.0 + 1) as usize;
    let count = window_size(k, m * n, window)
        .ok_or(Error::SearchBudgetExceeded { needed: u128::MAX, budget: budget.max_candidates })?;
    if count > budget.max_candidates {
        return Err(Error::SearchBudgetExceeded { needed: count, budget: budget.max_candidates });
    }
    Ok((0..count).map(|i| reply(ball, ratio, window, &pattern(k, len, i))).collect())
}

/// Keeps the centre and shrinks the radius.
#[derive(Clone, Copy, Debug, Default)]
pub struct ShrinkInPlace;

impl Strategy for ShrinkInPlace {
    fn name(&self) -> &str {
        "shrink"
    }

    fn propose(&mut self, t: &GameTranscript) -> Result<FormalBall> {
        Ok(t.last().shrink(t.next_ratio()))
    }
}

/// Uniformly random binding digits, from a seeded generator.
#[derive(Clone, Debug)]
pub struct BlackRandom {
    rng: ChaCha8Rng,
}

impl BlackRandom {
    pub fn new(seed: u64) -> Self {
        BlackRandom { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Strategy for BlackRandom {
    fn name(&self) -> &str {
        "black-random"
    }

    fn propose(&mut self, t: &GameTranscript) -> Result<FormalBall> {
        let ball = t.last();
        let Some(window) = choice_window(ball, t.next_ratio(), t.following_ratio()) else {
            return Ok(ball.shrink(t.next_ratio()));
        };
        let (m, n) = ball.shape();
        let k = ball.spec().k();
        let len = m * n * (window.1 - window.0 + 1) as usize;
        let digits: Vec<u8> = (0..len).map(|_| self.rng.gen_range(0..k) as u8).collect();
        Ok(reply(ball, t.next_ratio(), window, &digits))
    }
}

/// Follows a fixed branch sequence through the `ψ`-distinct replies; branch `i` is the
/// `i`-th digit pattern. After the labels run out it keeps taking branch 0.
#[derive(Clone, Debug)]
pub struct BlackBranch {
    labels: Vec<u64>,
    used: usize,
}

impl BlackBranch {
    pub fn new(labels: Vec<u64>) -> Self {
        BlackBranch { labels, used: 0 }
    }
}

impl Strategy for BlackBranch {
    fn name(&self) -> &str {
        "black-branch"
    }

    fn propose(&mut self, t: &GameTranscript) -> Result<FormalBall> {
        let ball = t.last();
        let label = self.labels.get(self.used).copied().unwrap_or(0);
        self.used += 1;
        let Some(window) = psi_window(ball, t.next_ratio()) else {
            return match label {
                0 => Ok(ball.shrink(t.next_ratio())),
                _ => Err(Error::BranchOutOfRange { index: label, base: 1 }),
            };
        };
        let (m, n) = ball.shape();
        let k = ball.spec().k();
        let base = window_size(k, m * n, window).unwrap_or(u128::MAX);
        if label as u128 >= base {
            return Err(Error::BranchOutOfRange { index: label, base: base.min(u64::MAX as u128) as u64 });
        }
        let len = m * n * (window.1 - window.0 + 1) as usize;
        Ok(reply(ball, t.next_ratio(), window, &pattern(k, len, label as u128)))
    }
}

/// Reads one centre per move (matrix syntax `a, b; c, d`); the radius is implied.
pub struct ReaderStrategy<R: BufRead> {
    input: R,
}

impl<R: BufRead> ReaderStrategy<R> {
    pub fn new(input: R) -> Self {
        ReaderStrategy { input }
    }
}

impl<R: BufRead> Strategy for ReaderStrategy<R> {
    fn name(&self) -> &str {
        "black-stdin"
    }

    fn propose(&mut self, t: &GameTranscript) -> Result<FormalBall> {
        let mut line = String::new();
        let read = self.input.read_line(&mut line).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        if read == 0 {
            return Err(Error::InvalidArgument("input ended before the game did".into()));
        }
        let center = SeriesMatrix::parse_flat(t.spec(), line.trim())?;
        FormalBall::new(center, t.last().radius() * t.next_ratio())
    }
}
