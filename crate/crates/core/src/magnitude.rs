//! Values of the absolute value: zero or an integral power of the field size `k`.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// `‖x‖` for some `x`: either `0` or `k^e`. Ordered as real numbers.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Magnitude {
    Zero,
    Pow(i64),
}

impl Magnitude {
    pub const ONE: Magnitude = Magnitude::Pow(0);

    pub fn exponent(self) -> Option<i64> {
        match self {
            Magnitude::Zero => None,
            Magnitude::Pow(e) => Some(e),
        }
    }

    pub fn is_zero(self) -> bool {
        self == Magnitude::Zero
    }

    pub fn pow(self, n: u32) -> Magnitude {
        match self {
            Magnitude::Zero if n == 0 => Magnitude::ONE,
            Magnitude::Zero => Magnitude::Zero,
            Magnitude::Pow(e) => Magnitude::Pow(e * n as i64),
        }
    }

    /// `self / other`; `None` when dividing by zero.
    pub fn checked_div(self, other: Magnitude) -> Option<Magnitude> {
        match (self, other) {
            (_, Magnitude::Zero) => None,
            (Magnitude::Zero, _) => Some(Magnitude::Zero),
            (Magnitude::Pow(a), Magnitude::Pow(b)) => Some(Magnitude::Pow(a - b)),
        }
    }

    pub fn to_f64(self, k: u32) -> f64 {
        match self {
            Magnitude::Zero => 0.0,
            Magnitude::Pow(e) => (k as f64).powi(e as i32),
        }
    }

    /// Exact value as a rational number.
    pub fn to_rational(self, k: u32) -> BigRational {
        match self {
            Magnitude::Zero => BigRational::zero(),
            Magnitude::Pow(e) => k_pow(k, e),
        }
    }
}

/// `k^e` as an exact rational.
pub fn k_pow(k: u32, e: i64) -> BigRational {
    let base = BigInt::from(k).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// Largest integer `f` with `k^f <= x`, for `x > 0`.
pub fn floor_log(k: u32, x: &BigRational) -> i64 {
    assert!(x > &BigRational::zero(), "logarithm of a non-positive number");
    // Start from a bit-length estimate, then correct.
    let bits = x.numer().bits() as i64 - x.denom().bits() as i64;
    let lk = (k as f64).log2();
    let mut f = (bits as f64 / lk).floor() as i64;
    while k_pow(k, f) > *x {
        f -= 1;
    }
    while k_pow(k, f + 1) <= *x {
        f += 1;
    }
    f
}

impl Mul for Magnitude {
    type Output = Magnitude;
    fn mul(self, rhs: Magnitude) -> Magnitude {
        match (self, rhs) {
            (Magnitude::Pow(a), Magnitude::Pow(b)) => Magnitude::Pow(a + b),
            _ => Magnitude::Zero,
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Zero => write!(f, "0"),
            Magnitude::Pow(e) => write!(f, "k^{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_products() {
        assert!(Magnitude::Zero < Magnitude::Pow(-100));
        assert!(Magnitude::Pow(-1) < Magnitude::ONE);
        assert_eq!(Magnitude::Pow(2) * Magnitude::Pow(-3), Magnitude::Pow(-1));
        assert_eq!(Magnitude::Zero * Magnitude::Pow(5), Magnitude::Zero);
        assert_eq!(Magnitude::Pow(2).pow(3), Magnitude::Pow(6));
    }

    #[test]
    fn floor_log_matches_definition() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(floor_log(2, &r(7, 10)), -1);
        assert_eq!(floor_log(2, &r(1, 8)), -3);
        assert_eq!(floor_log(3, &r(9, 1)), 2);
        assert_eq!(floor_log(3, &r(26, 3)), 1);
        assert_eq!(floor_log(3, &r(28, 3)), 2);
        assert_eq!(floor_log(2, &r(3, 4)), -1);
    }
}
