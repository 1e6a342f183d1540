//! Dense matrices over `F_q((X^-1))`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FqElem};
use crate::magnitude::Magnitude;
use crate::parse::parse_series;
use crate::series::LaurentSeries;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SeriesMatrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<LaurentSeries>,
}

impl SeriesMatrix {
    pub fn new(spec: &FieldSpec, rows: usize, cols: usize, data: Vec<LaurentSeries>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        for x in &data {
            spec.ensure_same(x.spec())?;
        }
        Ok(SeriesMatrix { spec: spec.clone(), rows, cols, data })
    }

    pub fn from_fn(
        spec: &FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> LaurentSeries,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        SeriesMatrix { spec: spec.clone(), rows, cols, data }
    }

    pub fn zeros(spec: &FieldSpec, rows: usize, cols: usize) -> Self {
        Self::from_fn(spec, rows, cols, |_, _| LaurentSeries::zero(spec))
    }

    pub fn identity(spec: &FieldSpec, n: usize) -> Self {
        Self::from_fn(spec, n, n, |i, j| if i == j { LaurentSeries::one(spec) } else { LaurentSeries::zero(spec) })
    }

    /// Rows of series strings in the text grammar.
    pub fn parse(spec: &FieldSpec, rows: &[Vec<String>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged matrix rows".into()));
            }
            for s in row {
                data.push(parse_series(s, spec)?);
            }
        }
        Self::new(spec, r, c, data)
    }

    /// Matrix in the `"a, b; c, d"` shorthand (rows split by `;`, entries by `,`).
    pub fn parse_flat(spec: &FieldSpec, text: &str) -> Result<Self> {
        let rows: Vec<Vec<String>> =
            text.split(';').map(|row| split_entries(row).into_iter().map(|s| s.trim().to_string()).collect()).collect();
        Self::parse(spec, &rows)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_string()).collect()).collect()
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: LaurentSeries) {
        assert_eq!(x.spec(), &self.spec);
        self.data[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[LaurentSeries] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<LaurentSeries> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<LaurentSeries> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(|x| x.is_exact())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.spec, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&LaurentSeries) -> LaurentSeries) -> Self {
        SeriesMatrix {
            spec: self.spec.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn truncate(&self, known_below: i64) -> Self {
        self.map(|x| x.truncate(known_below))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        self.spec.ensure_same(&other.spec)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self::from_fn(&self.spec, self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self::from_fn(&self.spec, self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.spec.ensure_same(&other.spec)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(&self.spec, self.rows, other.cols, |i, j| {
            let mut acc = LaurentSeries::zero(&self.spec);
            for t in 0..self.cols {
                acc = &acc + &(self.get(i, t) * other.get(t, j));
            }
            acc
        }))
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, x: &[LaurentSeries]) -> Result<Vec<LaurentSeries>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("vector of length {} against {} rows", x.len(), self.rows)));
        }
        Ok((0..self.cols)
            .map(|j| {
                let mut acc = LaurentSeries::zero(&self.spec);
                for (i, xi) in x.iter().enumerate() {
                    if !xi.is_zero() {
                        acc = &acc + &(xi * self.get(i, j));
                    }
                }
                acc
            })
            .collect())
    }

    /// `‖M‖_∞` over all entries.
    pub fn height(&self) -> Result<Magnitude> {
        crate::series::height(&self.data)
    }

    /// `‖self - other‖_∞`.
    pub fn distance(&self, other: &Self) -> Result<Magnitude> {
        self.sub(other)?.height()
    }

    /// Determinant. Exact entries use elimination; truncated ones use cofactor expansion.
    pub fn determinant(&self) -> Result<LaurentSeries> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        if self.is_exact() {
            return Ok(self.det_elimination());
        }
        if self.rows > 7 {
            return Err(Error::InvalidArgument("cofactor determinant limited to 7x7 truncated matrices".into()));
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.det_laplace(0, &idx))
    }

    fn det_laplace(&self, row: usize, cols: &[usize]) -> LaurentSeries {
        if cols.is_empty() {
            return LaurentSeries::one(&self.spec);
        }
        let mut acc = LaurentSeries::zero(&self.spec);
        for (t, &c) in cols.iter().enumerate() {
            let a = self.get(row, c);
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = a * &self.det_laplace(row + 1, &rest);
            acc = if t % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    fn det_elimination(&self) -> LaurentSeries {
        let n = self.rows;
        let mut m: Vec<Vec<LaurentSeries>> = (0..n).map(|i| self.row(i)).collect();
        let mut det = LaurentSeries::one(&self.spec);
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return LaurentSeries::zero(&self.spec);
            };
            if p != col {
                m.swap(p, col);
                det = -&det;
            }
            let pivot = m[col][col].clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero exact pivot");
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] * &inv;
                for c in col..n {
                    let t = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &t;
                }
            }
        }
        det
    }

    /// Inverse of a square matrix with exact entries.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        if !self.is_exact() {
            return Err(Error::InvalidArgument("inverse requires exact entries".into()));
        }
        let n = self.rows;
        let s = &self.spec;
        let mut m: Vec<Vec<LaurentSeries>> = (0..n)
            .map(|i| {
                let mut row = self.row(i);
                row.extend((0..n).map(|j| if i == j { LaurentSeries::one(s) } else { LaurentSeries::zero(s) }));
                row
            })
            .collect();
        for col in 0..n {
            let p = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::Singular)?;
            m.swap(p, col);
            let inv = m[col][col].inv()?;
            for c in 0..2 * n {
                m[col][c] = &m[col][c] * &inv;
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let t = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &t;
                }
            }
        }
        Ok(Self::from_fn(s, n, n, |i, j| m[i][n + j].clone()))
    }

    /// Add `x` to entry `(i, j)`.
    pub fn add_at(&self, i: usize, j: usize, x: &LaurentSeries) -> Self {
        let mut out = self.clone();
        let v = self.get(i, j) + x;
        out.set(i, j, v);
        out
    }

    /// Scalar multiple by `c X^e`.
    pub fn scale_monomial(&self, c: FqElem, e: i64) -> Self {
        self.map(|x| x.scale(c).mul_x_pow(e))
    }
}

/// Split on commas that are not inside parentheses.
fn split_entries(row: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in row.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&row[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&row[start..]);
    out
}

impl fmt::Display for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().into_iter().map(|r| r.join(", ")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeriesMatrix{self}")
    }
}
