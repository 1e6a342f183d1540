//! Sampled checks of the finite-game lemmas and calibration of `K_4 ... K_7`.
//!
//! The constants are existence-only in the argument; here they are replaced by extremal
//! ratios observed on random instances (k-powers, rounded in the safe direction).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::minors::{ball_sup, d_v, discrete_gradient, minors, phi, phi_direct, SubspaceBasis};
use super::Kind;
use crate::error::Result;
use crate::field::{FieldSpec, FqElem};
use crate::game::FormalBall;
use crate::magnitude::{floor_log, k_pow, Magnitude};
use crate::matrix::SeriesMatrix;
use crate::poly::Poly;
use crate::series::{height, LaurentSeries};

/// Exponents (base `k`) of the built-in constants and how they were obtained.
#[derive(Copy, Clone, Debug)]
pub struct DefaultConstants {
    pub k4: i64,
    pub k5: i64,
    pub k6: i64,
    pub k7: i64,
    pub provenance: &'static str,
}

pub const DEFAULT_CONSTANTS: DefaultConstants = DefaultConstants {
    k4: 0,
    k5: -1,
    k6: -9,
    k7: -6,
    provenance: "calibrate: k=2, m=1, n=1, sigma=k^0, alpha=1/4, beta=1/2, 1000 samples, seed 0 (empirical)",
};

fn mag_rat(k: u32, m: Magnitude) -> BigRational {
    m.to_rational(k)
}

/// Largest power `k^e` strictly below `x > 0`.
fn power_below(k: u32, x: &BigRational) -> i64 {
    let f = floor_log(k, x);
    if k_pow(k, f) == *x {
        f - 1
    } else {
        f
    }
}

/// Random polynomial generators of degree `<= 2`, repeated until independent.
pub fn random_basis<R: Rng>(spec: &FieldSpec, rng: &mut R, dim: usize, count: usize) -> Result<SubspaceBasis> {
    loop {
        let gens: Vec<Vec<Poly>> = (0..count)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let c: Vec<FqElem> = (0..3).map(|_| FqElem(rng.gen_range(0..spec.k()) as u8)).collect();
                        Poly::from_coeffs(spec, &c)
                    })
                    .collect()
            })
            .collect();
        let b = SubspaceBasis::from_generators(&gens)?;
        if b.len() == count {
            return Ok(b);
        }
    }
}

/// Random exact matrix with digits at exponents `top..=low`.
pub fn random_matrix<R: Rng>(spec: &FieldSpec, rng: &mut R, m: usize, n: usize, top: i64, low: i64) -> SeriesMatrix {
    SeriesMatrix::from_fn(spec, m, n, |_, _| LaurentSeries::random_exact(spec, rng, top, low))
}

/// A random point of the ball `‖A - c‖ <= k^e`, perturbed in a few digits below `e`.
fn random_point<R: Rng>(spec: &FieldSpec, rng: &mut R, c: &SeriesMatrix, e: i64) -> SeriesMatrix {
    let d = random_matrix(spec, rng, c.rows(), c.cols(), e, e - 3);
    c.add(&d).expect("same shape")
}

/// Outcome of sampling one inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// Draws rejected because the hypotheses did not hold.
    pub rejected: usize,
}

impl LemmaReport {
    fn new(name: &'static str) -> Self {
        LemmaReport { name, checked: 0, violations: 0, rejected: 0 }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0 && self.checked > 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "checked": self.checked,
            "violations": self.violations,
            "rejected": self.rejected,
        })
    }
}

/// Parameters shared by the samplers.
#[derive(Clone, Debug)]
pub struct SampleSetup {
    pub spec: FieldSpec,
    pub m: usize,
    pub n: usize,
    /// `μ_0, μ_1, ...` from a calibration.
    pub mu: Vec<BigRational>,
}

/// `M_v(A)` norm, with `M_{-1} = M_0 = (1)`.
fn m_norm(a: &SeriesMatrix, basis: &SubspaceBasis, v: i64) -> Result<Magnitude> {
    if v <= 0 {
        return Ok(Magnitude::ONE);
    }
    height(&minors(a, basis, v as usize, Kind::HType)?)
}

/// `M_v(B)` over a ball.
fn m_sup(ball: &FormalBall, basis: &SubspaceBasis, v: i64) -> Result<Magnitude> {
    if v <= 0 {
        return Ok(Magnitude::ONE);
    }
    ball_sup(ball, |a| minors(a, basis, v as usize, Kind::HType))
}

/// An outer ball `B_{i_{v-1}}` on which the induction hypothesis is certified, with the
/// radius `ρ_0` of the game's first ball. The hypothesis `‖M_{v-1}(A)‖ > ρ_0 μ M_{v-2}`
/// is certified on the whole ball when it holds at the centre with room for the
/// perturbation bound `‖M_{v-1}(A) - M_{v-1}(C)‖ <= ρ M_{v-2}`.
struct Outer {
    basis: SubspaceBasis,
    v: usize,
    ball: FormalBall,
    rho0: BigRational,
    mu: BigRational,
    m_prev: Magnitude,
}

fn draw_outer<R: Rng>(setup: &SampleSetup, rng: &mut R) -> Result<Option<Outer>> {
    let (spec, m, n) = (&setup.spec, setup.m, setup.n);
    let k = spec.k();
    let basis = random_basis(spec, rng, m + n, m)?;
    let v = rng.gen_range(1..=m);
    let f0 = -rng.gen_range(1..5);
    let c = random_matrix(spec, rng, m, n, 0, -8);
    let ball = FormalBall::new(c.clone(), k_pow(k, f0))?;
    let rho0 = k_pow(k, (f0 + rng.gen_range(0..3)).min(-1));
    let mu = setup.mu.get(v - 1).cloned().unwrap_or_else(BigRational::one);
    let m_prev = m_sup(&ball, &basis, v as i64 - 2)?;
    let at_center = mag_rat(k, m_norm(&c, &basis, v as i64 - 1)?);
    let slack = mag_rat(k, Magnitude::Pow(f0) * m_prev);
    let need = &rho0 * &mu * mag_rat(k, m_prev);
    if at_center > slack && at_center > need {
        Ok(Some(Outer { basis, v, ball, rho0, mu, m_prev }))
    } else {
        Ok(None)
    }
}

/// An inner ball of radius `< factor · μ · ρ(outer)` inside the outer ball.
fn draw_inner<R: Rng>(spec: &FieldSpec, rng: &mut R, o: &Outer, factor: &BigRational) -> Result<FormalBall> {
    let k = spec.k();
    let f0 = o.ball.effective_exponent();
    let e = power_below(k, &(factor * &o.mu * o.ball.radius())).min(f0 - 1);
    let c = random_point(spec, rng, o.ball.center(), f0 - 1);
    FormalBall::new(c, k_pow(k, e))
}

/// `‖M_{v-1}(A) - M_{v-1}(A')‖ < ε ρ_0 μ_{v-1} M_{v-2}(B_{i_{v-1}})` for `A, A'` in a
/// ball of radius `< ε μ_{v-1} ρ(B_{i_{v-1}})`.
pub fn sample_winfinite2(setup: &SampleSetup, samples: usize, seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = &setup.spec;
    let k = spec.k();
    let mut rep = LemmaReport::new("winfinite2");
    while rep.checked < samples {
        let Some(o) = draw_outer(setup, &mut rng)? else {
            rep.rejected += 1;
            continue;
        };
        let eps = k_pow(k, -rng.gen_range(0..3));
        let inner = draw_inner(spec, &mut rng, &o, &eps)?;
        let e = inner.effective_exponent();
        let a = random_point(spec, &mut rng, inner.center(), e);
        let b = random_point(spec, &mut rng, inner.center(), e);
        let diff: Vec<LaurentSeries> = minors(&a, &o.basis, o.v - 1, Kind::HType)?
            .iter()
            .zip(&minors(&b, &o.basis, o.v - 1, Kind::HType)?)
            .map(|(x, y)| x - y)
            .collect();
        let lhs = mag_rat(k, height(&diff)?);
        let rhs = &eps * &o.rho0 * &o.mu * mag_rat(k, o.m_prev);
        rep.checked += 1;
        if lhs >= rhs {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

/// `‖M_{v-1}(A')‖ > ½ M_{v-1}(B')` for `B'` of radius `< ½ μ_{v-1} ρ(B_{i_{v-1}})`.
pub fn sample_finite1(setup: &SampleSetup, samples: usize, seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = &setup.spec;
    let k = spec.k();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut rep = LemmaReport::new("finite1");
    while rep.checked < samples {
        let Some(o) = draw_outer(setup, &mut rng)? else {
            rep.rejected += 1;
            continue;
        };
        let inner = draw_inner(spec, &mut rng, &o, &half)?;
        let a = random_point(spec, &mut rng, inner.center(), inner.effective_exponent());
        let lhs = mag_rat(k, m_norm(&a, &o.basis, o.v as i64 - 1)?);
        let rhs = &half * mag_rat(k, m_sup(&inner, &o.basis, o.v as i64 - 1)?);
        rep.checked += 1;
        if lhs <= rhs {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

/// `Φ(xz) = ‖x‖ Φ(z)`, and the last-column expansion agrees with the definition.
pub fn sample_phi(setup: &SampleSetup, samples: usize, seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (spec, m, n) = (&setup.spec, setup.m, setup.n);
    let mut rep = LemmaReport::new("phi-homogeneity");
    while rep.checked < samples {
        let basis = random_basis(spec, &mut rng, m + n, m)?;
        let v = rng.gen_range(1..=m);
        let a = random_matrix(spec, &mut rng, m, n, 0, -6);
        let z: Vec<LaurentSeries> = (0..m + n).map(|_| LaurentSeries::random_exact(spec, &mut rng, 1, -5)).collect();
        let x = LaurentSeries::random_exact(spec, &mut rng, 2, -3);
        if x.is_zero() {
            rep.rejected += 1;
            continue;
        }
        let xz: Vec<LaurentSeries> = z.iter().map(|c| &x * c).collect();
        let base = phi(&z, &a, &basis, v, Kind::HType)?;
        let scaled = phi(&xz, &a, &basis, v, Kind::HType)?;
        rep.checked += 1;
        if scaled != x.norm()? * base || base != phi_direct(&z, &a, &basis, v, Kind::HType)? {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

/// `‖M_{v-1}(A + x E_ij) - M_{v-1}(A)‖ <= ‖x‖ M_{v-2}(B)` for `A, A + x E_ij ∈ B`.
pub fn sample_perturbation(setup: &SampleSetup, samples: usize, seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (spec, m, n) = (&setup.spec, setup.m, setup.n);
    let k = spec.k();
    let mut rep = LemmaReport::new("perturbation");
    while rep.checked < samples {
        let basis = random_basis(spec, &mut rng, m + n, m)?;
        let v = rng.gen_range(1..=m);
        let f = -rng.gen_range(0..4);
        let ball = FormalBall::new(random_matrix(spec, &mut rng, m, n, 0, -8), k_pow(k, f))?;
        let a = random_point(spec, &mut rng, ball.center(), f);
        let x = LaurentSeries::random_exact(spec, &mut rng, f, f - 4);
        let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..n));
        let b = a.add_at(i, j, &x);
        let diff: Vec<LaurentSeries> = minors(&b, &basis, v - 1, Kind::HType)?
            .iter()
            .zip(&minors(&a, &basis, v - 1, Kind::HType)?)
            .map(|(p, q)| p - q)
            .collect();
        rep.checked += 1;
        if height(&diff)? > x.norm()? * m_sup(&ball, &basis, v as i64 - 2)? {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

/// Calibrated constants and the `μ_v`, `K_6` chains they induce.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub k: u32,
    pub m: usize,
    pub n: usize,
    pub sigma: Magnitude,
    pub alpha: BigRational,
    pub beta: BigRational,
    pub samples: usize,
    pub seed: u64,
    pub k4: BigRational,
    pub k5: BigRational,
    pub k7: BigRational,
    pub epsilon: BigRational,
    /// `K_6` for `v = 0, ..., m`.
    pub k6: Vec<BigRational>,
    /// `μ_v` for `v = 0, ..., m`.
    pub mu: Vec<BigRational>,
    /// Instances that satisfied the hypotheses, per constant `K_4, K_5, K_7`.
    pub used: [usize; 3],
}

impl Calibration {
    pub fn provenance(&self) -> String {
        format!(
            "calibrate: k={}, m={}, n={}, sigma={}, alpha={}, beta={}, {} samples, seed {} (empirical)",
            self.k, self.m, self.n, self.sigma, self.alpha, self.beta, self.samples, self.seed
        )
    }

    pub fn to_json(&self) -> Value {
        let s = |v: &[BigRational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        json!({
            "K4": self.k4.to_string(),
            "K5": self.k5.to_string(),
            "K6": s(&self.k6),
            "K7": self.k7.to_string(),
            "epsilon": self.epsilon.to_string(),
            "mu": s(&self.mu),
            "instances_used": {"K4": self.used[0], "K5": self.used[1], "K7": self.used[2]},
            "provenance": self.provenance(),
        })
    }

    pub fn setup(&self, spec: &FieldSpec) -> SampleSetup {
        SampleSetup { spec: spec.clone(), m: self.m, n: self.n, mu: self.mu.clone() }
    }
}

/// Inputs of a calibration sweep.
#[derive(Clone, Debug)]
pub struct CalibrationRequest {
    pub spec: FieldSpec,
    pub m: usize,
    pub n: usize,
    pub sigma: Magnitude,
    pub alpha: BigRational,
    pub beta: BigRational,
    pub samples: usize,
    pub seed: u64,
}

fn min_opt(a: Option<BigRational>, b: BigRational) -> Option<BigRational> {
    Some(match a {
        Some(x) if x <= b => x,
        _ => b,
    })
}

/// Sweep random instances for the extremal ratios behind `K_4`, `K_5`, `K_7`, then
/// run the recursions for `K_6` and `μ_v`.
pub fn calibrate(req: &CalibrationRequest) -> Result<Calibration> {
    let spec = &req.spec;
    let (m, n) = (req.m, req.n);
    let k = spec.k();
    let sigma_exp = req.sigma.exponent().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let mut k4: Option<BigRational> = None;
    let mut k5: Option<BigRational> = None;
    let mut k7: Option<BigRational> = None;
    let mut used = [0usize; 3];
    let eighth = BigRational::new(BigInt::one(), BigInt::from(8));
    for _ in 0..req.samples {
        let basis = random_basis(spec, &mut rng, m + n, m)?;
        let v = rng.gen_range(1..=m);
        let c = random_matrix(spec, &mut rng, m, n, sigma_exp, sigma_exp - 8);
        let f = -rng.gen_range(1..5);

        // K4: gradient differences against M_{v-1} differences.
        let a1 = random_point(spec, &mut rng, &c, f);
        let a2 = random_point(spec, &mut rng, &c, f);
        let dg: Vec<LaurentSeries> = discrete_gradient(&a1, &basis, v, Kind::HType)?
            .iter()
            .zip(&discrete_gradient(&a2, &basis, v, Kind::HType)?)
            .map(|(x, y)| x - y)
            .collect();
        let dm: Vec<LaurentSeries> = minors(&a1, &basis, v - 1, Kind::HType)?
            .iter()
            .zip(&minors(&a2, &basis, v - 1, Kind::HType)?)
            .map(|(x, y)| x - y)
            .collect();
        if let Some(r) = height(&dg)?.checked_div(height(&dm)?) {
            used[0] += 1;
            let r = mag_rat(k, r);
            k4 = Some(match k4 {
                Some(x) if x >= r => x,
                _ => r,
            });
        }

        // K7: ‖D_v(A)‖ against ‖(A - C)·∇D_v(A)‖.
        let dv = d_v(&a1, &basis, v, Kind::HType)?;
        let grad = discrete_gradient(&a1, &basis, v, Kind::HType)?;
        let delta = a1.sub(&c)?;
        let mut dot = LaurentSeries::zero(spec);
        for (x, g) in delta.entries().iter().zip(&grad) {
            dot = &dot + &(x * g);
        }
        if let Some(r) = dv.norm()?.checked_div(dot.norm()?) {
            if !dv.is_zero() {
                used[2] += 1;
                k7 = min_opt(k7, mag_rat(k, r));
            }
        }

        // K5: make D_m nearly vanish by moving one entry, then test the hypotheses.
        if v != m {
            continue;
        }
        let Some(idx) = grad.iter().position(|g| !g.is_zero()) else { continue };
        let x = (-&d_v(&c, &basis, v, Kind::HType)?).checked_div(&grad[idx])?;
        let depth = rng.gen_range(4..10);
        let Ok(x) = x.round_at(-depth) else { continue };
        let a = c.add_at(idx / n, idx % n, &x);
        if a.height()? > req.sigma {
            continue;
        }
        let inner = FormalBall::new(a.clone(), k_pow(k, -rng.gen_range(3..7)))?;
        let mv_b = m_sup(&inner, &basis, v as i64 - 1)?;
        let mv = height(&minors(&a, &basis, v, Kind::HType)?)?;
        if mag_rat(k, mv) >= &eighth * mag_rat(k, mv_b) {
            continue;
        }
        if v >= 2 {
            let lead = d_v(&a, &basis, v - 1, Kind::HType)?.norm()?;
            if lead < m_norm(&a, &basis, v as i64 - 1)? {
                continue;
            }
        }
        let g = height(&discrete_gradient(&a, &basis, v, Kind::HType)?)?;
        if let Some(r) = g.checked_div(mv_b) {
            used[1] += 1;
            k5 = min_opt(k5, mag_rat(k, r) / BigRational::from_integer(BigInt::from(k)));
        }
    }
    // Gradient coordinates are cofactor combinations with unit-bounded weights, so 1
    // is always valid; it stands in when no sample moved the gradient.
    let k4 = k4.filter(|x| !x.is_zero()).unwrap_or_else(BigRational::one);
    let k5 = k5.unwrap_or_else(|| k_pow(k, DEFAULT_CONSTANTS.k5));
    let k7 = k7.unwrap_or_else(|| k_pow(k, DEFAULT_CONSTANTS.k7));
    let ab = &req.alpha * &req.beta;
    let inv_k = BigRational::new(BigInt::one(), BigInt::from(k));
    let gamma = &inv_k + &ab - (&inv_k + BigRational::one()) * &req.alpha;
    let eight = BigRational::from_integer(BigInt::from(8));
    let epsilon = &gamma * &k5 / (&eight * &k4);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let shrink = if epsilon < half { epsilon.clone() } else { half };
    let mut k6 = vec![BigRational::one()];
    let mut mu = vec![BigRational::one()];
    for v in 1..=m {
        let next_k6 = &ab * &shrink * &mu[v - 1] * &k6[v - 1];
        let three = BigRational::from_integer(BigInt::from(3));
        let cands = [eighth.clone(), &gamma / &eight * &ab * &next_k6, &three * &gamma / &eight * &k5 * &next_k6 * &k7];
        let next_mu = cands.iter().cloned().fold(None, min_opt).expect("three candidates");
        k6.push(next_k6);
        mu.push(if next_mu > BigRational::zero() { next_mu } else { eighth.clone() });
    }
    Ok(Calibration {
        k,
        m,
        n,
        sigma: req.sigma,
        alpha: req.alpha.clone(),
        beta: req.beta.clone(),
        samples: req.samples,
        seed: req.seed,
        k4,
        k5,
        k7,
        epsilon,
        k6,
        mu,
        used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(m: usize, n: usize) -> CalibrationRequest {
        CalibrationRequest {
            spec: FieldSpec::prime(2).unwrap(),
            m,
            n,
            sigma: Magnitude::ONE,
            alpha: BigRational::new(1.into(), 4.into()),
            beta: BigRational::new(1.into(), 2.into()),
            samples: 60,
            seed: 0,
        }
    }

    #[test]
    fn random_bases_are_orthonormal() {
        let s = FieldSpec::prime(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let b = random_basis(&s, &mut rng, 3, 2).unwrap();
            assert!(b.is_orthonormal().unwrap());
            let t: Vec<LaurentSeries> = (0..2).map(|_| LaurentSeries::random_exact(&s, &mut rng, 2, -2)).collect();
            let (sum, max) = b.combination_norms(&t).unwrap();
            assert_eq!(sum, max);
        }
    }

    #[test]
    fn calibration_is_positive_and_ordered() {
        for (m, n) in [(1, 1), (2, 1)] {
            let c = calibrate(&req(m, n)).unwrap();
            assert!(c.k4 <= BigRational::one(), "gradient coordinates are combinations of cofactors");
            assert!(c.k5 > BigRational::zero() && c.k7 > BigRational::zero());
            assert_eq!(c.mu.len(), m + 1);
            assert!(c.mu.iter().all(|x| *x > BigRational::zero()));
            assert!(c.k6.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn lemma_samplers_small() {
        for (m, n) in [(1, 1), (2, 1), (1, 2)] {
            let c = calibrate(&req(m, n)).unwrap();
            let setup = c.setup(&FieldSpec::prime(2).unwrap());
            for rep in [
                sample_winfinite2(&setup, 40, 1).unwrap(),
                sample_finite1(&setup, 40, 2).unwrap(),
                sample_phi(&setup, 40, 3).unwrap(),
                sample_perturbation(&setup, 40, 4).unwrap(),
            ] {
                assert!(rep.holds(), "{rep:?} for m={m}, n={n}");
            }
        }
    }
}
