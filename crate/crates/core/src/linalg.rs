//! Linear algebra over `F_q` and over `F_q(X)` (the latter on polynomial vectors).

use crate::field::FieldSpec;
use crate::poly::Poly;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(spec: &FieldSpec, rows: &mut Vec<Vec<u8>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(p, r);
        let inv = spec.inv_u8(rows[r][c]);
        for v in rows[r].iter_mut() {
            *v = spec.mul_u8(*v, inv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c] == 0 {
                continue;
            }
            let f = spec.neg_u8(rows[i][c]);
            for j in 0..ncols {
                let t = spec.mul_u8(f, rows[r][j]);
                rows[i][j] = spec.add_u8(rows[i][j], t);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{v : M v = 0}` for `M` given by its rows.
pub fn kernel(spec: &FieldSpec, rows: &[Vec<u8>], ncols: usize) -> Vec<Vec<u8>> {
    let mut m = rows.to_vec();
    let pivots = rref(spec, &mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u8; ncols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = spec.neg_u8(m[r][f]);
            }
            v
        })
        .collect()
}

pub fn rank(spec: &FieldSpec, rows: &[Vec<u8>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(spec, &mut m, ncols).len()
}

/// Incremental echelon basis over `F_q(X)` for polynomial vectors of a fixed length.
#[derive(Clone, Debug)]
pub struct PolyEchelon {
    /// Rows with their pivot column; entries left of the pivot vanish.
    rows: Vec<(usize, Vec<Poly>)>,
}

impl PolyEchelon {
    pub fn new() -> Self {
        PolyEchelon { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Poly]) -> Vec<Poly> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let (a, b) = (row[*p].clone(), v[*p].clone());
            for j in 0..v.len() {
                v[j] = &(&v[j] * &a) - &(&row[j] * &b);
            }
            let g = v.iter().fold(Poly::zero(a.spec()), |g, x| g.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for x in v.iter_mut() {
                    *x = x.div_rem(&g).0;
                }
            }
        }
        v
    }

    /// True if `v` is independent of the rows so far.
    pub fn is_independent(&self, v: &[Poly]) -> bool {
        self.reduce(v).iter().any(|x| !x.is_zero())
    }

    /// Insert `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[Poly]) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, r));
                self.rows.sort_by_key(|(p, _)| *p);
                true
            }
            None => false,
        }
    }
}

impl Default for PolyEchelon {
    fn default() -> Self {
        Self::new()
    }
}

/// Rank over `F_q(X)` of a list of polynomial vectors.
pub fn poly_rank(vectors: &[Vec<Poly>]) -> usize {
    let mut e = PolyEchelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Determinant of a square polynomial matrix (exact, by fraction-free elimination).
pub fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n));
    let spec = m[0][0].spec().clone();
    let mut a = m.to_vec();
    let mut sign_neg = false;
    let mut prev = Poly::one(&spec);
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else { return Poly::zero(&spec) };
        if p != k {
            a.swap(p, k);
            sign_neg = !sign_neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.div_rem(&prev).0;
            }
            a[i][k] = Poly::zero(&spec);
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign_neg {
        -&d
    } else {
        d
    }
}
