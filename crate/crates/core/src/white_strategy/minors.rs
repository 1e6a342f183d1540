//! Minor vectors `M_v`, the determinants `D_v`, discrete gradients and `Φ`.
//!
//! Everything is built from the matrix `G(A)` with entries `y_h · col_l(H(A))`, where
//! `H` is `Â*` (h-type, `l <= m`) or `Â` (k-type, `l <= n`).

use crate::approx::hat_of;
use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::game::FormalBall;
use crate::geom::weak_popov;
use crate::linalg::{self, PolyEchelon};
use crate::magnitude::Magnitude;
use crate::matrix::SeriesMatrix;
use crate::poly::Poly;
use crate::series::{height, LaurentSeries};

use super::Kind;

/// Vectors `y_1, ..., y_b` in `L^{m+n}` with `‖Σ t_i y_i‖ = max ‖t_i‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    pub y: Vec<Vec<LaurentSeries>>,
}

impl SubspaceBasis {
    /// A reduced basis of the span of `generators`, each vector scaled to norm 1.
    pub fn from_generators(generators: &[Vec<Poly>]) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Ok(SubspaceBasis { y: Vec::new() });
        };
        let mut ech = PolyEchelon::new();
        let independent: Vec<Vec<Poly>> = generators.iter().filter(|g| ech.insert(g)).cloned().collect();
        if independent.is_empty() {
            return Ok(SubspaceBasis { y: Vec::new() });
        }
        let (_, reduced) = weak_popov(independent, &vec![0; first.len()]);
        let y = reduced
            .iter()
            .map(|row| {
                let deg = row.iter().filter_map(|p| p.degree()).max().expect("nonzero row") as i64;
                row.iter().map(|p| LaurentSeries::from_poly(p).mul_x_pow(-deg)).collect()
            })
            .collect();
        let basis = SubspaceBasis { y };
        if !basis.is_orthonormal()? {
            return Err(Error::InvalidArgument("reduced basis is not orthonormal".into()));
        }
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Exact criterion: unit norms and `F_q`-independent leading digit vectors.
    pub fn is_orthonormal(&self) -> Result<bool> {
        let Some(first) = self.y.first() else { return Ok(true) };
        let spec = first[0].spec().clone();
        let mut leads = Vec::new();
        for v in &self.y {
            if height(v)? != Magnitude::ONE {
                return Ok(false);
            }
            let row: Result<Vec<u8>> = v.iter().map(|x| x.coeff(0).map(|c| c.0)).collect();
            leads.push(row?);
        }
        Ok(linalg::rank(&spec, &leads, first.len()) == self.y.len())
    }

    /// `‖Σ t_i y_i‖_∞` and `max ‖t_i‖`, for sampling the defining property.
    pub fn combination_norms(&self, t: &[LaurentSeries]) -> Result<(Magnitude, Magnitude)> {
        let d = self.y[0].len();
        let spec = self.y[0][0].spec();
        let mut sum = vec![LaurentSeries::zero(spec); d];
        for (ti, yi) in t.iter().zip(&self.y) {
            for (s, y) in sum.iter_mut().zip(yi) {
                *s = &*s + &(ti * y);
            }
        }
        Ok((height(&sum)?, height(t)?))
    }
}

fn dot(a: &[LaurentSeries], b: &[LaurentSeries]) -> LaurentSeries {
    let mut acc = LaurentSeries::zero(a[0].spec());
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}

/// Columns `col_l(H(A))` used by the minors.
fn hat_columns(a: &SeriesMatrix, kind: Kind) -> Vec<Vec<LaurentSeries>> {
    let (h, count) = match kind {
        Kind::HType => (hat_of(&a.transpose()), a.rows()),
        Kind::KType => (hat_of(a), a.cols()),
    };
    (0..count).map(|l| h.col(l)).collect()
}

/// `G(A)`: rows indexed by basis vectors, columns by `l`.
pub fn g_matrix(a: &SeriesMatrix, basis: &SubspaceBasis, kind: Kind) -> Vec<Vec<LaurentSeries>> {
    let cols = hat_columns(a, kind);
    basis.y.iter().map(|y| cols.iter().map(|c| dot(y, c)).collect()).collect()
}

fn det(g: &[Vec<LaurentSeries>], rows: &[usize], cols: &[usize]) -> Result<LaurentSeries> {
    let spec = g[0][0].spec();
    if rows.is_empty() {
        return Ok(LaurentSeries::one(spec));
    }
    let sub = SeriesMatrix::from_fn(spec, rows.len(), cols.len(), |i, j| g[rows[i]][cols[j]].clone());
    sub.determinant()
}

/// All `v`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, v: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, v: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == v {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, v, &mut Vec::new(), &mut out);
    out
}

/// `M_v(A)`: every `v x v` minor of `G(A)`, row subsets outermost. `M_0 = (1)`.
pub fn minors(a: &SeriesMatrix, basis: &SubspaceBasis, v: usize, kind: Kind) -> Result<Vec<LaurentSeries>> {
    if v == 0 {
        return Ok(vec![LaurentSeries::one(a.spec())]);
    }
    let g = g_matrix(a, basis, kind);
    let cols = g.first().map_or(0, |r| r.len());
    if v > basis.len() || v > cols {
        return Err(Error::DimensionMismatch(format!("no {v}x{v} minors of a {}x{cols} matrix", basis.len())));
    }
    let mut out = Vec::new();
    for rs in subsets(basis.len(), v) {
        for cs in subsets(cols, v) {
            out.push(det(&g, &rs, &cs)?);
        }
    }
    Ok(out)
}

/// `D_v(A)`: the leading `v x v` minor.
pub fn d_v(a: &SeriesMatrix, basis: &SubspaceBasis, v: usize, kind: Kind) -> Result<LaurentSeries> {
    if v == 0 {
        return Ok(LaurentSeries::one(a.spec()));
    }
    let g = g_matrix(a, basis, kind);
    let idx: Vec<usize> = (0..v).collect();
    det(&g, &idx, &idx)
}

/// `(D_v(A + E_ij) - D_v(A))` over all entries, row-major.
pub fn discrete_gradient(a: &SeriesMatrix, basis: &SubspaceBasis, v: usize, kind: Kind) -> Result<Vec<LaurentSeries>> {
    let base = d_v(a, basis, v, kind)?;
    let one = LaurentSeries::one(a.spec());
    let mut out = Vec::with_capacity(a.rows() * a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.push(&d_v(&a.add_at(i, j, &one), basis, v, kind)? - &base);
        }
    }
    Ok(out)
}

/// The coefficients `d_h`, `h = 1..v`: minors of the leading `v x v` block of `G`
/// with row `h` and the last column removed.
pub fn expansion_coefficients(
    a: &SeriesMatrix,
    basis: &SubspaceBasis,
    v: usize,
    kind: Kind,
) -> Result<Vec<LaurentSeries>> {
    let g = g_matrix(a, basis, kind);
    let cols: Vec<usize> = (0..v - 1).collect();
    (0..v)
        .map(|h| {
            let rows: Vec<usize> = (0..v).filter(|&r| r != h).collect();
            det(&g, &rows, &cols)
        })
        .collect()
}

/// `Φ(z) = ‖Σ_h (-1)^{h+1} d_h y_h · z‖`.
pub fn phi(z: &[LaurentSeries], a: &SeriesMatrix, basis: &SubspaceBasis, v: usize, kind: Kind) -> Result<Magnitude> {
    if v == 0 || v > basis.len() {
        return Err(Error::DimensionMismatch(format!("Φ needs 1 <= v <= {}", basis.len())));
    }
    let d = expansion_coefficients(a, basis, v, kind)?;
    let spec = a.spec();
    let mut acc = vec![LaurentSeries::zero(spec); z.len()];
    for (h, dh) in d.iter().enumerate() {
        let term = if h % 2 == 0 { dh.clone() } else { -dh };
        for (s, y) in acc.iter_mut().zip(&basis.y[h]) {
            *s = &*s + &(&term * y);
        }
    }
    dot(&acc, z).norm()
}

/// `Φ(z)` straight from its definition: the change of `D_v` when column `v` of `G`
/// is shifted by `y_h · z`.
pub fn phi_direct(
    z: &[LaurentSeries],
    a: &SeriesMatrix,
    basis: &SubspaceBasis,
    v: usize,
    kind: Kind,
) -> Result<Magnitude> {
    let g = g_matrix(a, basis, kind);
    let idx: Vec<usize> = (0..v).collect();
    let before = det(&g, &idx, &idx)?;
    let mut shifted = g.clone();
    for h in 0..v {
        shifted[h][v - 1] = &g[h][v - 1] + &dot(&basis.y[h], z);
    }
    (&det(&shifted, &idx, &idx)? - &before).norm()
}

/// `sup_{A ∈ ψ(B)} ‖f(A)‖_∞` for `f` affine in each entry of `A` separately (minors,
/// determinants, gradients). Writing `A = C + X^e U` with `‖U‖ <= 1`, `f` is a
/// multiaffine polynomial in `U`, and its supremum is the largest coefficient norm
/// (its reduction is a nonzero multilinear polynomial, nonvanishing somewhere on `{0,1}^N`).
pub fn ball_sup<F>(ball: &FormalBall, f: F) -> Result<Magnitude>
where
    F: Fn(&SeriesMatrix) -> Result<Vec<LaurentSeries>>,
{
    let (m, n) = ball.shape();
    let vars = m * n;
    if vars > 16 {
        return Err(Error::InvalidArgument("too many entries for an exact supremum".into()));
    }
    let e = ball.effective_exponent();
    let spec = ball.spec();
    let step = LaurentSeries::monomial(spec, FqElem::ONE, e);
    let vertex = |mask: usize| {
        let mut a = ball.center().clone();
        for v in 0..vars {
            if mask >> v & 1 == 1 {
                a = a.add_at(v / n, v % n, &step);
            }
        }
        a
    };
    let values: Vec<Vec<LaurentSeries>> = (0..1usize << vars).map(|s| f(&vertex(s))).collect::<Result<_>>()?;
    let mut best = Magnitude::Zero;
    for s in 0..1usize << vars {
        // Möbius inversion: c_S = Σ_{T ⊆ S} (-1)^{|S \ T|} f(T).
        let mut coeff = vec![LaurentSeries::zero(spec); values[0].len()];
        let mut t = s;
        loop {
            let odd = (s ^ t).count_ones() % 2 == 1;
            for (c, v) in coeff.iter_mut().zip(&values[t]) {
                *c = if odd { &*c - v } else { &*c + v };
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & s;
        }
        best = best.max(height(&coeff)?);
    }
    Ok(best)
}
