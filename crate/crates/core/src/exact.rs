//! Exact arithmetic for the closed forms: factorials, binomials and
//! numbers of the shape `q * pi^j` with `q` rational.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// Largest argument accepted by [`binomial`] and [`factorial`].
pub const MAX_EXACT: u32 = 64;

pub fn factorial(m: u32) -> BigInt {
    (2..=m).fold(BigInt::one(), |acc, i| acc * i)
}

/// `C(n, r)` with exact integer arithmetic; zero when `r > n`.
pub fn binomial(n: u32, r: u32) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn binomial_f64(n: u32, r: u32) -> f64 {
    binomial(n, r).to_f64().unwrap_or(f64::INFINITY)
}

pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    // Ratio<BigInt>::to_f64 rounds correctly even when numerator and
    // denominator individually overflow f64.
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// A number `coeff * pi^pi_power` with an exact rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiMultiple {
    pub coeff: BigRational,
    pub pi_power: u32,
}

impl PiMultiple {
    pub fn new(coeff: BigRational, pi_power: u32) -> Self {
        Self { coeff, pi_power }
    }

    pub fn rational(coeff: BigRational) -> Self {
        Self::new(coeff, 0)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.coeff) * PI.powi(self.pi_power as i32)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(&self.coeff * q, self.pi_power)
    }
}

impl Mul for &PiMultiple {
    type Output = PiMultiple;
    fn mul(self, rhs: &PiMultiple) -> PiMultiple {
        PiMultiple::new(&self.coeff * &rhs.coeff, self.pi_power + rhs.pi_power)
    }
}

impl Div<&BigRational> for &PiMultiple {
    type Output = PiMultiple;
    fn div(self, rhs: &BigRational) -> PiMultiple {
        PiMultiple::new(&self.coeff / rhs, self.pi_power)
    }
}

impl fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_power {
            0 => write!(f, "{}", self.coeff),
            1 => write!(f, "({})·π", self.coeff),
            j => write!(f, "({})·π^{}", self.coeff, j),
        }
    }
}

/// `Gamma(d/2)` for integer `d >= 1`, as an exact `q * pi^(1/2)`-free value
/// when `d` is even and as `q * sqrt(pi)` when `d` is odd. Returned as
/// `(q, has_sqrt_pi)`.
pub fn gamma_half(d: u32) -> Result<(BigRational, bool)> {
    if d == 0 {
        return invalid("Gamma(d/2) needs d >= 1");
    }
    if d % 2 == 0 {
        Ok((BigRational::from_integer(factorial(d / 2 - 1)), false))
    } else {
        // Gamma(m + 1/2) = (2m)! / (4^m m!) * sqrt(pi)
        let m = (d - 1) / 2;
        let num = factorial(2 * m);
        let den = BigInt::from(4u32).pow(m) * factorial(m);
        Ok((BigRational::new(num, den), true))
    }
}

/// Surface measure of the unit sphere `S^(d-1)` in `R^d`, exactly.
pub fn sphere_volume_exact(d: u32) -> Result<PiMultiple> {
    let (g, sqrt_pi) = gamma_half(d)?;
    let two = BigRational::from_integer(BigInt::from(2));
    // 2 pi^(d/2) / Gamma(d/2); for odd d the sqrt(pi) in Gamma cancels a
    // half power of pi.
    let pi_power = if sqrt_pi { (d - 1) / 2 } else { d / 2 };
    Ok(PiMultiple::new(two / g, pi_power))
}

/// `omega_{d-1} = 2 pi^{d/2} / Gamma(d/2)`.
pub fn sphere_volume(d: i64) -> Result<f64> {
    if d <= 0 {
        return invalid(format!("sphere dimension d must be >= 1, got {d}"));
    }
    Ok(sphere_volume_exact(d as u32)?.to_f64())
}
