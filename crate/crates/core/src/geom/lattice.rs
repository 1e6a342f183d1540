//! Parallelepipeds as shifted polynomial lattices.
//!
//! Writing column `j` of `A` as `N_j / L_j` with `L_j` monic and `N_j` polynomial,
//! `F_A(x) = k^{max_j (deg (xN)_j - w_j)}` with `w_j = deg L_j + e_j`. Successive minima
//! are then shifted row degrees of a reduced basis of the row module of `N`.

use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::linalg::{self, PolyEchelon};
use crate::matrix::SeriesMatrix;
use crate::poly::Poly;

#[derive(Clone, Debug)]
pub(crate) struct ShiftedLattice {
    pub n: Vec<Vec<Poly>>,
    pub w: Vec<i64>,
}

/// Shifted degree of a polynomial vector: `max_j (deg v_j - w_j)`, `None` for zero.
pub(crate) fn sdeg(v: &[Poly], w: &[i64]) -> Option<i64> {
    v.iter().zip(w).filter_map(|(p, &wj)| p.degree().map(|d| d as i64 - wj)).max()
}

/// Rightmost position attaining the shifted degree.
fn leading_pos(v: &[Poly], w: &[i64]) -> Option<usize> {
    let s = sdeg(v, w)?;
    (0..v.len()).rev().find(|&j| v[j].degree().map(|d| d as i64 - w[j]) == Some(s))
}

/// Shifted weak Popov form of the rows of `b` (full row rank, any number of columns).
/// Returns the transformation `U` and `U b`, both sorted by shifted row degree.
pub(crate) fn weak_popov(mut b: Vec<Vec<Poly>>, w: &[i64]) -> (Vec<Vec<Poly>>, Vec<Vec<Poly>>) {
    let r = b.len();
    let cols = w.len();
    let spec = b[0][0].spec().clone();
    let mut u: Vec<Vec<Poly>> =
        (0..r).map(|i| (0..r).map(|j| if i == j { Poly::one(&spec) } else { Poly::zero(&spec) }).collect()).collect();
    loop {
        let lps: Vec<Option<usize>> = b.iter().map(|row| leading_pos(row, w)).collect();
        let clash = (0..r).find_map(|a| ((a + 1)..r).find(|&c| lps[a] == lps[c]).map(|c| (a, c)));
        let Some((r1, r2)) = clash else { break };
        let p = lps[r1].expect("rows must be independent");
        let (dg1, dg2) = (b[r1][p].degree().unwrap(), b[r2][p].degree().unwrap());
        let (hi, lo) = if dg1 >= dg2 { (r1, r2) } else { (r2, r1) };
        let shift = b[hi][p].degree().unwrap() - b[lo][p].degree().unwrap();
        let f = spec.mul(b[hi][p].lead(), spec.inv(b[lo][p].lead()).unwrap());
        let t = Poly::monomial(&spec, f, shift);
        for j in 0..cols {
            b[hi][j] = &b[hi][j] - &(&t * &b[lo][j]);
        }
        for j in 0..r {
            u[hi][j] = &u[hi][j] - &(&t * &u[lo][j]);
        }
    }
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by_key(|&i| sdeg(&b[i], w));
    (order.iter().map(|&i| u[i].clone()).collect(), order.iter().map(|&i| b[i].clone()).collect())
}

impl ShiftedLattice {
    pub fn from_matrix(a: &SeriesMatrix, e: &[i64]) -> Result<Self> {
        let d = a.rows();
        let spec = a.spec();
        let mut n = vec![vec![Poly::zero(spec); d]; d];
        let mut w = Vec::with_capacity(d);
        for j in 0..d {
            let mut l = Poly::one(spec);
            for i in 0..d {
                let (_, den) = a
                    .get(i, j)
                    .as_rational()
                    .ok_or_else(|| Error::InvalidArgument("parallelepiped entries must be exact".into()))?;
                l = &l * &den.div_rem(&l.gcd(den)).0;
            }
            for (i, row) in n.iter_mut().enumerate() {
                let (num, den) = a.get(i, j).as_rational().unwrap();
                row[j] = num * &l.div_rem(den).0;
            }
            w.push(l.degree().unwrap() as i64 + e[j]);
        }
        Ok(ShiftedLattice { n, w })
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn det_degree(&self) -> Result<i64> {
        let det = linalg::poly_det(&self.n);
        det.degree().map(|d| d as i64).ok_or(Error::Singular)
    }

    /// `sum log_k λ_j`, from the product law.
    pub fn minima_sum(&self) -> Result<i64> {
        Ok(self.det_degree()? - self.w.iter().sum::<i64>())
    }

    /// Reduce to shifted weak Popov form. Returns `(U, U N)` with the rows of `U`
    /// realizing the successive minima, sorted by shifted degree.
    pub fn reduce(&self) -> (Vec<Vec<Poly>>, Vec<Vec<Poly>>) {
        weak_popov(self.n.clone(), &self.w)
    }

    /// Minima from the reduced basis: `(log_k λ_j, witness x_j)`.
    pub fn reduced_minima(&self) -> Vec<(i64, Vec<Poly>)> {
        let (u, b) = self.reduce();
        u.into_iter().zip(&b).map(|(x, row)| (sdeg(row, &self.w).unwrap(), x)).collect()
    }

    /// Minima by searching the box `deg x_i <= box_deg`: for increasing `s`, the vectors
    /// with `F(x) <= k^s` form an `F_q`-space (a kernel), whose span over `F_q(X)` is
    /// tracked incrementally. Values are upper bounds for the true minima.
    pub fn box_minima(&self, box_deg: usize) -> Vec<(i64, Vec<Poly>)> {
        let d = self.dim();
        let spec = self.n[0][0].spec().clone();
        let nunk = d * (box_deg + 1);
        let col_deg: Vec<usize> =
            (0..d).map(|j| (0..d).filter_map(|i| self.n[i][j].degree()).max().unwrap_or(0)).collect();
        let s_lo = -self.w.iter().max().copied().unwrap();
        let s_hi = (0..d)
            .flat_map(|j| (0..d).filter_map(move |i| self.n[i][j].degree().map(|g| g as i64 - self.w[j])))
            .max()
            .unwrap()
            + box_deg as i64;
        let mut echelon = PolyEchelon::new();
        let mut out = Vec::new();
        for s in s_lo..=s_hi {
            // Coefficients of (xN)_j at degrees above s + w_j must vanish.
            let mut rows = Vec::new();
            for j in 0..d {
                let top = box_deg + col_deg[j];
                let from = (s + self.w[j] + 1).max(0) as usize;
                for g in from..=top {
                    let mut row = vec![0u8; nunk];
                    for i in 0..d {
                        for t in 0..=box_deg.min(g) {
                            row[i * (box_deg + 1) + t] = self.n[i][j].coeff(g - t).0;
                        }
                    }
                    rows.push(row);
                }
            }
            for v in linalg::kernel(&spec, &rows, nunk) {
                let x: Vec<Poly> = (0..d)
                    .map(|i| {
                        let c: Vec<FqElem> =
                            v[i * (box_deg + 1)..(i + 1) * (box_deg + 1)].iter().map(|&a| FqElem(a)).collect();
                        Poly::from_coeffs(&spec, &c)
                    })
                    .collect();
                if echelon.insert(&x) {
                    out.push((s, x));
                }
            }
            if out.len() == d {
                break;
            }
        }
        out
    }
}
