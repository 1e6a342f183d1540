//! Survival counts of digit cells under `‖q‖^m ⟨qA⟩^n >= K`.
//!
//! For `‖q‖ = k^h` the inequality reads `⟨qA⟩ >= k^-σ_h` with
//! `σ_h = ⌊(mh - κ)/n⌋`, `K = k^κ`. It fails iff the first `σ_h` fractional digits of
//! `qA` vanish, and those digits only involve the digits of `A` down to `-(σ_h + h)`.
//! A depth-first walk over digit prefixes can therefore decide every inequality as
//! soon as its digits are fixed and drop the whole subtree on failure.

use std::thread;

use serde::Serialize;

use crate::approx::{FracTable, SearchBudget};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::magnitude::Magnitude;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxCountRow {
    pub t: usize,
    pub cells_total: u128,
    pub cells_surviving: u128,
    /// `log(cells_surviving) / (t log k)`; `None` for `t = 0` or no survivors.
    pub empirical_dim: Option<f64>,
}

impl BoxCountRow {
    pub const CSV_HEADER: &'static str = "t,cells_total,cells_surviving,empirical_dim";

    pub fn to_csv(&self) -> String {
        let dim = match self.empirical_dim {
            Some(d) => format!("{d:.6}"),
            None if self.cells_surviving == 0 => "-inf".to_string(),
            None => String::new(),
        };
        format!("{},{},{},{}", self.t, self.cells_total, self.cells_surviving, dim)
    }
}

/// `(h, σ_h)` for every height class under the cap; `None` when there is nothing to check.
fn constraints(k_const: Magnitude, height_cap: Magnitude, m: usize, n: usize) -> Option<Vec<(usize, i64)>> {
    let kappa = k_const.exponent()?;
    let top = height_cap.exponent().filter(|&e| e >= 0)?;
    Some((0..=top as usize).map(|h| (h, (m as i64 * h as i64 - kappa).div_euclid(n as i64))).collect())
}

/// Number of `A` digits the inequality at height class `h` depends on (`0` when it can never hold).
fn depth_of(h: usize, sigma: i64) -> usize {
    if sigma <= 0 {
        0
    } else {
        sigma as usize + h
    }
}

/// Deepest digit any inequality under the cap depends on.
pub fn required_depth(k_const: Magnitude, height_cap: Magnitude, m: usize, n: usize) -> usize {
    constraints(k_const, height_cap, m, n)
        .map(|cs| cs.iter().map(|&(h, s)| depth_of(h, s)).max().unwrap_or(0))
        .unwrap_or(0)
}

struct Walk<'a> {
    spec: &'a FieldSpec,
    m: usize,
    n: usize,
    t: usize,
    bottom: usize,
    /// `due[d]`: inequalities decided once `d` digits are fixed.
    due: Vec<Vec<(usize, i64)>>,
    /// `digits[j][i]`, the digits of `A_ij` fixed so far.
    digits: Vec<Vec<Vec<u8>>>,
    counts: Vec<u128>,
}

impl Walk<'_> {
    fn passes(&self, d: usize) -> bool {
        self.due[d].iter().all(|&(h, sigma)| {
            sigma > 0
                && FracTable::from_digits(self.spec, self.m, &self.digits, d, h)
                    .dist_at_least(h, sigma)
                    .expect("exact digit tables decide every distance")
        })
    }

    fn push(&mut self, mut code: usize) {
        let k = self.spec.k() as usize;
        for col in self.digits.iter_mut() {
            for entry in col.iter_mut() {
                entry.push((code % k) as u8);
                code /= k;
            }
        }
    }

    fn pop(&mut self) {
        for col in self.digits.iter_mut() {
            for entry in col.iter_mut() {
                entry.pop();
            }
        }
    }

    fn branching(&self) -> usize {
        (self.spec.k() as usize).pow((self.m * self.n) as u32)
    }

    /// Whether the current prefix (of length `d`) extends to a surviving matrix.
    fn visit(&mut self, d: usize) -> bool {
        if !self.passes(d) {
            return false;
        }
        let alive = d == self.bottom || self.children(d, 0..self.branching());
        if alive && d <= self.t {
            self.counts[d] += 1;
        }
        alive
    }

    fn children(&mut self, d: usize, codes: std::ops::Range<usize>) -> bool {
        let mut any = false;
        for code in codes {
            self.push(code);
            let alive = self.visit(d + 1);
            self.pop();
            any |= alive;
            // Below the counted resolution one witness is enough.
            if any && d >= self.t {
                break;
            }
        }
        any
    }
}

/// Surviving cells of `I^{mn}` at resolutions `k^-1, ..., k^-t`.
#[allow(clippy::too_many_arguments)]
pub fn box_count_bad(
    spec: &FieldSpec,
    k_const: Magnitude,
    height_cap: Magnitude,
    t: usize,
    m: usize,
    n: usize,
    budget: SearchBudget,
    threads: usize,
) -> Result<Vec<BoxCountRow>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("m and n must be positive".into()));
    }
    let k = spec.k();
    let mn = (m * n) as u32;
    let total_at = |d: usize| (k as u128).checked_pow(mn * d as u32);
    let rows_from = |counts: &[u128]| -> Result<Vec<BoxCountRow>> {
        (1..=t)
            .map(|d| {
                let cells_total = total_at(d)
                    .ok_or(Error::SearchBudgetExceeded { needed: u128::MAX, budget: budget.max_candidates })?;
                let s = counts[d];
                let empirical_dim = (s > 0).then(|| (s as f64).ln() / (d as f64 * (k as f64).ln()));
                Ok(BoxCountRow { t: d, cells_total, cells_surviving: s, empirical_dim })
            })
            .collect()
    };

    let Some(cs) = constraints(k_const, height_cap, m, n) else {
        let counts: Vec<u128> = (0..=t).map(|d| total_at(d).unwrap_or(u128::MAX)).collect();
        return rows_from(&counts);
    };
    let bottom = cs.iter().map(|&(h, s)| depth_of(h, s)).max().unwrap_or(0).max(t);
    let needed = total_at(bottom).unwrap_or(u128::MAX);
    if needed > budget.max_candidates {
        return Err(Error::SearchBudgetExceeded { needed, budget: budget.max_candidates });
    }
    let mut due = vec![Vec::new(); bottom + 1];
    for &(h, s) in &cs {
        due[depth_of(h, s)].push((h, s));
    }
    let walk = || Walk {
        spec,
        m,
        n,
        t,
        bottom,
        due: due.clone(),
        digits: vec![vec![Vec::new(); m]; n],
        counts: vec![0; t + 1],
    };

    let root = walk();
    if !root.passes(0) {
        return rows_from(&root.counts);
    }
    if bottom == 0 {
        return rows_from(&[1]);
    }
    let width = root.branching();
    let threads = threads.clamp(1, width);
    let chunk = width.div_ceil(threads);
    let parts: Vec<(bool, Vec<u128>)> = thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|p| {
                let mut w = walk();
                let codes = p * chunk..((p + 1) * chunk).min(width);
                scope.spawn(move || {
                    let any = w.children(0, codes);
                    (any, w.counts)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("box count worker panicked")).collect()
    });
    let mut counts = vec![0u128; t + 1];
    let mut any = false;
    for (a, c) in parts {
        any |= a;
        for (x, y) in counts.iter_mut().zip(c) {
            *x += y;
        }
    }
    counts[0] = any as u128;
    rows_from(&counts)
}
