//! The fractional digits of `qA` are `F_q`-linear in the coefficients of `q`.
//!
//! For `q` of height at most `k^h`, the digit of `(qA)_j` at exponent `-t` is
//! `sum_{i,d} q_{i,d} a_{ij}(-t-d)`, where `a_{ij}(u)` is the digit of `A_ij` at `u`.
//! Hence `{q : ⟨qA⟩ <= k^{-s-1}}` is the kernel of an explicit `F_q`-linear map, and
//! minimal distances reduce to kernel computations.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FqElem};
use crate::linalg;
use crate::magnitude::Magnitude;
use crate::matrix::SeriesMatrix;
use crate::poly::Poly;

/// Enclosure `lower <= value <= upper` for a distance; exact when the two agree.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct DistBound {
    pub lower: Magnitude,
    pub upper: Magnitude,
}

impl DistBound {
    pub fn exact(m: Magnitude) -> Self {
        DistBound { lower: m, upper: m }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn value(&self) -> Result<Magnitude> {
        if self.is_exact() {
            Ok(self.upper)
        } else {
            Err(Error::PrecisionExhausted(format!("distance only known to lie in [{}, {}]", self.lower, self.upper)))
        }
    }
}

struct Column {
    /// For exact columns, the degree of the common denominator: a fraction with that
    /// denominator vanishes iff its first `window` digits do.
    window: Option<usize>,
    /// Digits known at exponents `-1..=-known` for every row.
    known: usize,
    /// `digits[i][u - 1]` is the coefficient of `X^-u` in `A_ij`.
    digits: Vec<Vec<u8>>,
}

pub(crate) struct FracTable {
    spec: FieldSpec,
    m: usize,
    cols: Vec<Column>,
}

impl FracTable {
    /// Tabulate enough digits to handle every height up to `k^max_height`.
    pub fn new(a: &SeriesMatrix, max_height: usize) -> Self {
        let spec = a.spec().clone();
        let (m, n) = (a.rows(), a.cols());
        let cols = (0..n)
            .map(|j| {
                let col = a.col(j);
                let truncated_kb = col.iter().filter_map(|x| x.known_below()).max();
                let (window, known) = match truncated_kb {
                    Some(kb) => (None, usize::try_from(-kb).unwrap_or(0)),
                    None => {
                        let mut l = Poly::one(&spec);
                        for x in &col {
                            let (_, den) = x.as_rational().unwrap();
                            l = &l * &den.div_rem(&l.gcd(den)).0;
                        }
                        let w = l.degree().unwrap();
                        (Some(w), w + max_height)
                    }
                };
                let digits = col
                    .iter()
                    .map(|x| {
                        (1..=known).map(|u| x.coeff(-(u as i64)).expect("digit within tracked precision").0).collect()
                    })
                    .collect();
                Column { window, known, digits }
            })
            .collect();
        FracTable { spec, m, cols }
    }

    /// Table for the Laurent polynomial matrix whose entry `(i, j)` has digits
    /// `cols[j][i]` at exponents `-1, -2, ...` and nothing below `-depth`.
    pub fn from_digits(spec: &FieldSpec, m: usize, cols: &[Vec<Vec<u8>>], depth: usize, max_height: usize) -> Self {
        let known = depth + max_height;
        let cols = cols
            .iter()
            .map(|col| {
                debug_assert_eq!(col.len(), m);
                let digits = col
                    .iter()
                    .map(|d| {
                        let mut d = d[..d.len().min(depth)].to_vec();
                        d.resize(known, 0);
                        d
                    })
                    .collect();
                Column { window: Some(depth), known, digits }
            })
            .collect();
        FracTable { spec: spec.clone(), m, cols }
    }

    /// Number of digits of `(qA)_j` that are meaningful at height `h`, and whether
    /// checking them decides exactly (exact columns).
    fn limit(&self, j: usize, h: usize) -> usize {
        let c = &self.cols[j];
        match c.window {
            Some(w) => w,
            None => c.known.saturating_sub(h),
        }
    }

    /// Smallest digit budget among truncated columns (`None` when all are exact).
    fn trusted_depth(&self, h: usize) -> Option<usize> {
        (0..self.cols.len()).filter(|&j| self.cols[j].window.is_none()).map(|j| self.limit(j, h)).min()
    }

    /// Whether constraints on `s` digits at height `h` are all backed by known digits.
    pub fn certifies(&self, h: usize, s: usize) -> bool {
        self.trusted_depth(h).is_none_or(|tr| s <= tr)
    }

    fn deepest(&self, h: usize) -> usize {
        (0..self.cols.len()).map(|j| self.limit(j, h)).max().unwrap_or(0)
    }

    fn rows(&self, h: usize, s: usize) -> Vec<Vec<u8>> {
        let nunk = self.m * (h + 1);
        let mut rows = Vec::new();
        for (j, col) in self.cols.iter().enumerate() {
            for t in 1..=s.min(self.limit(j, h)) {
                let mut row = vec![0u8; nunk];
                for i in 0..self.m {
                    for d in 0..=h {
                        row[i * (h + 1) + d] = col.digits[i][t + d - 1];
                    }
                }
                rows.push(row);
            }
        }
        rows
    }

    /// Basis of the `q` (height `<= k^h`) whose first `s` fractional digits vanish in
    /// every column, capped at each column's meaningful depth.
    pub fn kernel(&self, h: usize, s: usize) -> Vec<Vec<u8>> {
        linalg::kernel(&self.spec, &self.rows(h, s), self.m * (h + 1))
    }

    pub fn to_polys(&self, v: &[u8], h: usize) -> Vec<Poly> {
        (0..self.m)
            .map(|i| {
                let c: Vec<FqElem> = v[i * (h + 1)..(i + 1) * (h + 1)].iter().map(|&x| FqElem(x)).collect();
                Poly::from_coeffs(&self.spec, &c)
            })
            .collect()
    }

    /// Enclosure of `D(h) = min {⟨qA⟩ : 0 < ‖q‖ <= k^h}` and a `q` attaining the upper bound.
    pub fn min_dist(&self, h: usize) -> (DistBound, Vec<Poly>) {
        let trusted = self.trusted_depth(h);
        let deepest = self.deepest(h);
        let mut last = self.kernel(h, 0);
        for s in 1..=deepest {
            let ker = self.kernel(h, s);
            if ker.is_empty() {
                let lower = Magnitude::Pow(-(s as i64));
                let witness = pick(&last, self.m, h);
                let bound = match trusted {
                    Some(tr) if s - 1 > tr => DistBound { lower, upper: Magnitude::Pow(-(tr as i64) - 1) },
                    _ => DistBound::exact(lower),
                };
                return (bound, self.to_polys(&witness, h));
            }
            last = ker;
        }
        let witness = pick(&last, self.m, h);
        let bound = match trusted {
            None => DistBound::exact(Magnitude::Zero),
            Some(tr) => DistBound { lower: Magnitude::Zero, upper: Magnitude::Pow(-(tr as i64) - 1) },
        };
        (bound, self.to_polys(&witness, h))
    }

    /// Decide `D(h) >= k^-sigma`.
    pub fn dist_at_least(&self, h: usize, sigma: i64) -> Result<bool> {
        if sigma <= 0 {
            return Ok(false);
        }
        let s = sigma as usize;
        if self.kernel(h, s).is_empty() {
            return Ok(true);
        }
        match self.trusted_depth(h) {
            Some(tr) if s > tr => Err(Error::PrecisionExhausted(format!(
                "deciding ⟨qA⟩ >= k^-{s} at height k^{h} needs {s} digits, {tr} available"
            ))),
            _ => Ok(false),
        }
    }
}

/// Kernel vector of least height (ties broken by basis order).
fn pick(basis: &[Vec<u8>], m: usize, h: usize) -> Vec<u8> {
    let height =
        |v: &Vec<u8>| (0..m).filter_map(|i| (0..=h).rev().find(|&d| v[i * (h + 1) + d] != 0)).max().unwrap_or(0);
    basis.iter().min_by_key(|v| height(v)).cloned().expect("nonempty kernel")
}
