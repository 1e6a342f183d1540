//! Geometry of numbers over `F_q((X^-1))`: parallelepipeds, successive minima,
//! Haar measure and polar bodies.

mod lattice;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::approx::hat_of;
use crate::error::{Error, Result};
use crate::magnitude::{k_pow, Magnitude};
use crate::matrix::SeriesMatrix;
use crate::poly::Poly;
use crate::series::LaurentSeries;

pub(crate) use lattice::weak_popov;
use lattice::ShiftedLattice;

/// `P_A(λ) = {x : F_A(x) < λ}` with `F_A(x) = max_j ‖(xA)_j‖ / c_j` and `c_j = k^{e_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Parallelepiped {
    a: SeriesMatrix,
    e: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessiveMinima {
    /// `λ_1 <= ... <= λ_d`.
    pub values: Vec<Magnitude>,
    /// Independent lattice vectors with `F_A(a_j) = λ_j`.
    pub witnesses: Vec<Vec<Poly>>,
}

impl SuccessiveMinima {
    pub fn exponents(&self) -> Vec<i64> {
        self.values.iter().map(|v| v.exponent().expect("minima are positive")).collect()
    }

    pub fn to_json(&self, measure_exponent: i64) -> Value {
        json!({
            "lambdas": self.exponents(),
            "witnesses": self.witnesses.iter()
                .map(|w| w.iter().map(|p| p.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "measure_exponent": measure_exponent,
        })
    }
}

impl Parallelepiped {
    /// `a` must be square, invertible and exact; `bound_exponents[j] = log_k c_j`.
    pub fn new(a: SeriesMatrix, bound_exponents: Vec<i64>) -> Result<Self> {
        if a.rows() != a.cols() || a.rows() != bound_exponents.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix with {} bounds",
                a.rows(),
                a.cols(),
                bound_exponents.len()
            )));
        }
        if !a.is_exact() {
            return Err(Error::InvalidArgument("parallelepiped entries must be exact".into()));
        }
        if a.determinant()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Parallelepiped { a, e: bound_exponents })
    }

    /// Unit bounds.
    pub fn unit(a: SeriesMatrix) -> Result<Self> {
        let d = a.rows();
        Self::new(a, vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &SeriesMatrix {
        &self.a
    }

    pub fn bound_exponents(&self) -> &[i64] {
        &self.e
    }

    /// `F_A(x)`.
    pub fn distance_value(&self, x: &[LaurentSeries]) -> Result<Magnitude> {
        let xa = self.a.left_mul(x)?;
        let mut best = Magnitude::Zero;
        for (v, &e) in xa.iter().zip(&self.e) {
            if let Magnitude::Pow(p) = v.norm()? {
                best = best.max(Magnitude::Pow(p - e));
            }
        }
        Ok(best)
    }

    pub fn distance_poly(&self, x: &[Poly]) -> Magnitude {
        let v: Vec<LaurentSeries> = x.iter().map(LaurentSeries::from_poly).collect();
        self.distance_value(&v).expect("exact entries")
    }

    /// `log_k μ(P_A(1)) = sum e_j - log_k ‖det A‖`.
    pub fn measure_exponent(&self) -> i64 {
        let det = self.a.determinant().unwrap();
        self.e.iter().sum::<i64>() - det.lead_exp().unwrap().unwrap()
    }

    /// `μ(P_A(1))`, normalized so that the unit ball has measure 1.
    pub fn measure(&self) -> BigRational {
        k_pow(self.a.spec().k(), self.measure_exponent())
    }

    /// The same distance function with unit bounds: column `j` divided by `X^{e_j}`.
    pub fn canonical(&self) -> Parallelepiped {
        let d = self.dim();
        let spec = self.a.spec();
        let b = SeriesMatrix::from_fn(spec, d, d, |i, j| self.a.get(i, j).mul_x_pow(-self.e[j]));
        Parallelepiped { a: b, e: vec![0; d] }
    }

    /// The polar body: matrix `(A diag(1/c))^{-T}` with unit bounds.
    pub fn polar(&self) -> Result<Parallelepiped> {
        let b = self.canonical().a;
        let inv_t = b.inverse()?.transpose();
        Parallelepiped::unit(inv_t)
    }

    /// `F*(y) = sup_x ‖x·y‖ / F_A(x)`, evaluated as the maximum over the rows of the
    /// inverse of the canonical matrix (where `F_A = 1`).
    pub fn polar_value_by_sup(&self, y: &[LaurentSeries]) -> Result<Magnitude> {
        let inv = self.canonical().a.inverse()?;
        let mut best = Magnitude::Zero;
        for i in 0..self.dim() {
            let row = inv.row(i);
            let f = self.distance_value(&row)?;
            let mut dot = LaurentSeries::zero(self.a.spec());
            for (a, b) in row.iter().zip(y) {
                dot = &dot + &(a * b);
            }
            let ratio = dot.norm()?.checked_div(f).ok_or(Error::Singular)?;
            best = best.max(ratio);
        }
        Ok(best)
    }

    fn lattice(&self) -> ShiftedLattice {
        ShiftedLattice::from_matrix(&self.a, &self.e).expect("validated on construction")
    }

    /// Successive minima by searching coordinates of degree `<= degree_bound`, certified
    /// complete through the product law `λ_1 ⋯ λ_d = μ(P_A(1))^{-1}`.
    pub fn successive_minima(&self, degree_bound: usize) -> Result<SuccessiveMinima> {
        let lat = self.lattice();
        let found = lat.box_minima(degree_bound);
        let total: i64 = found.iter().map(|(s, _)| s).sum();
        if found.len() < self.dim() || total != lat.minima_sum()? {
            let required =
                lat.reduce().0.iter().flat_map(|row| row.iter().filter_map(|p| p.degree())).max().unwrap_or(0);
            return Err(Error::SearchIncomplete { required: required.max(degree_bound + 1) });
        }
        Ok(SuccessiveMinima {
            values: found.iter().map(|(s, _)| Magnitude::Pow(*s)).collect(),
            witnesses: found.into_iter().map(|(_, x)| x).collect(),
        })
    }

    /// Successive minima read off a shifted-reduced basis (independent of any search).
    pub fn reduced_minima(&self) -> SuccessiveMinima {
        let found = self.lattice().reduced_minima();
        SuccessiveMinima {
            values: found.iter().map(|(s, _)| Magnitude::Pow(*s)).collect(),
            witnesses: found.into_iter().map(|(_, x)| x).collect(),
        }
    }

    /// The body `{y : ‖y_{l'}‖ < R^{m(1+i)} (l' <= n), ‖y·col_l(Ĉ*)‖ < R^{-n(1+i)} (l <= m)}`
    /// for an `m x n` centre `C` and `R = k^r`.
    pub fn structured(c: &SeriesMatrix, r: i64, level: i64) -> Result<Parallelepiped> {
        let (m, n) = (c.rows() as i64, c.cols() as i64);
        let hat_star = hat_of(&c.transpose());
        let mut e = vec![-n * (1 + level) * r; m as usize];
        e.extend(vec![m * (1 + level) * r; n as usize]);
        Parallelepiped::new(hat_star, e)
    }

    /// The companion body `{x : ‖x_l‖ < R^{n(1+i)} (l <= m), ‖x·col_{l'}(Ĉ)‖ < R^{-m(1+i)} (l' <= n)}`.
    pub fn structured_dual(c: &SeriesMatrix, r: i64, level: i64) -> Result<Parallelepiped> {
        let (m, n) = (c.rows() as i64, c.cols() as i64);
        let hat = hat_of(c);
        let mut e = vec![-m * (1 + level) * r; n as usize];
        e.extend(vec![n * (1 + level) * r; m as usize]);
        Parallelepiped::new(hat, e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub lambdas: Vec<i64>,
    pub sigmas: Vec<i64>,
    /// `log_k (λ_j σ_{d+1-j})` for every `j`.
    pub products: Vec<i64>,
    /// `λ_m σ_{n+1} = 1`.
    pub holds: bool,
}

impl DualityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "lambdas": self.lambdas,
            "sigmas": self.sigmas,
            "pair_products": self.products,
            "lambda_m_sigma_n1_is_one": self.holds,
        })
    }
}

/// Minima of `P` and of its polar, and the products `λ_j σ_{d+1-j}`.
pub fn check_duality(p: &Parallelepiped, m: usize, n: usize, degree_bound: usize) -> Result<DualityReport> {
    let d = p.dim();
    if m + n != d || m == 0 || n == 0 {
        return Err(Error::DimensionMismatch(format!("m + n = {} but dimension is {d}", m + n)));
    }
    let lambdas = p.successive_minima(degree_bound)?.exponents();
    let sigmas = p.polar()?.successive_minima(degree_bound)?.exponents();
    let products: Vec<i64> = (0..d).map(|j| lambdas[j] + sigmas[d - 1 - j]).collect();
    let holds = lambdas[m - 1] + sigmas[n] == 0;
    Ok(DualityReport { lambdas, sigmas, products, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldSpec, FqElem};

    fn diag(spec: &FieldSpec, a: &str) -> SeriesMatrix {
        SeriesMatrix::parse_flat(spec, a).unwrap()
    }

    #[test]
    fn identity_and_diagonal_examples() {
        let s = FieldSpec::prime(2).unwrap();
        let id = Parallelepiped::unit(SeriesMatrix::identity(&s, 3)).unwrap();
        let mins = id.successive_minima(2).unwrap();
        assert_eq!(mins.exponents(), vec![0, 0, 0]);
        assert_eq!(id.measure_exponent(), 0);

        let p = Parallelepiped::unit(diag(&s, "X, 0; 0, X^-1")).unwrap();
        let mins = p.successive_minima(3).unwrap();
        assert_eq!(mins.exponents(), vec![-1, 1]);
        assert_eq!(mins.witnesses[0], vec![Poly::zero(&s), Poly::one(&s)]);
        assert_eq!(mins.witnesses[1], vec![Poly::one(&s), Poly::zero(&s)]);
        let y = [LaurentSeries::zero(&s), LaurentSeries::one(&s)];
        assert_eq!(p.distance_value(&y).unwrap(), Magnitude::Pow(-1));

        let r = check_duality(&p, 1, 1, 3).unwrap();
        assert!(r.holds);
        assert_eq!(r.products, vec![0, 0]);
    }

    #[test]
    fn measures() {
        let s = FieldSpec::prime(3).unwrap();
        let p = Parallelepiped::new(SeriesMatrix::identity(&s, 2), vec![1, 1]).unwrap();
        assert_eq!(p.measure(), BigRational::from_integer(9.into()));
        let q = Parallelepiped::unit(diag(&s, "X, 0; 0, 1")).unwrap();
        assert_eq!(q.measure_exponent(), -1);
    }

    #[test]
    fn polar_is_an_involution() {
        let s = FieldSpec::prime(2).unwrap();
        let p = Parallelepiped::new(diag(&s, "X + 1, X^-1; 1, X^2"), vec![1, -1]).unwrap();
        assert_eq!(p.polar().unwrap().polar().unwrap(), p.canonical());
        let id = Parallelepiped::unit(SeriesMatrix::identity(&s, 2)).unwrap();
        assert_eq!(id.polar().unwrap(), id);
    }

    /// Enumerate every `x` with coordinates of degree `<= bound`, sort by `F_A`, keep
    /// the independent ones.
    fn brute_minima(p: &Parallelepiped, bound: usize) -> Vec<i64> {
        let d = p.dim();
        let spec = p.matrix().spec().clone();
        let k = spec.k() as u64;
        let per = bound + 1;
        let total = k.pow((d * per) as u32);
        let mut all: Vec<(i64, Vec<Poly>)> = (1..total)
            .map(|mut idx| {
                let x: Vec<Poly> = (0..d)
                    .map(|_| {
                        let c: Vec<FqElem> = (0..per)
                            .map(|_| {
                                let v = (idx % k) as u32;
                                idx /= k;
                                spec.elem(v).unwrap()
                            })
                            .collect();
                        Poly::from_coeffs(&spec, &c)
                    })
                    .collect();
                (p.distance_poly(&x).exponent().unwrap(), x)
            })
            .collect();
        all.sort_by_key(|(v, _)| *v);
        let mut ech = crate::linalg::PolyEchelon::new();
        all.into_iter().filter(|(_, x)| ech.insert(x)).map(|(v, _)| v).collect()
    }

    #[test]
    fn minima_agree_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for k in [2u32, 3] {
            let s = FieldSpec::prime(k).unwrap();
            let mut done = 0;
            while done < 12 {
                let d = rng.gen_range(1..=2);
                let a = SeriesMatrix::from_fn(&s, d, d, |_, _| {
                    let top = rng.gen_range(-2..=2);
                    LaurentSeries::random_exact(&s, &mut rng, top, top - 2)
                });
                let e: Vec<i64> = (0..d).map(|_| rng.gen_range(-1..=1)).collect();
                let Ok(p) = Parallelepiped::new(a, e) else { continue };
                let reduced = p.reduced_minima();
                let bound =
                    reduced.witnesses.iter().flat_map(|w| w.iter().filter_map(|c| c.degree())).max().unwrap_or(0);
                if d * (bound + 1) > 8 {
                    continue;
                }
                let brute = brute_minima(&p, bound);
                assert_eq!(brute, reduced.exponents());
                assert_eq!(p.successive_minima(bound).unwrap().exponents(), brute);
                assert_eq!(brute.iter().sum::<i64>(), -p.measure_exponent());
                done += 1;
            }
        }
    }

    #[test]
    fn incomplete_box_is_detected() {
        let s = FieldSpec::prime(2).unwrap();
        // Short vectors need large coordinates: (X^3, 1) A = (X^3 + X^3 + X^-1 ...)
        let p = Parallelepiped::unit(diag(&s, "1, 0; X^3 + X^-4, X^-8")).unwrap();
        let reduced = p.reduced_minima();
        match p.successive_minima(0) {
            Err(Error::SearchIncomplete { required }) => {
                let full = p.successive_minima(required).unwrap();
                assert_eq!(full.values, reduced.values);
            }
            Ok(m) => assert_eq!(m.values, reduced.values),
            Err(e) => panic!("{e}"),
        }
    }
}
