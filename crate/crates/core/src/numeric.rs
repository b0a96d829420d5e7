//! Weight backends for the level recursion.
//!
//! Partition functions grow doubly exponentially in the depth, so the default
//! backend stores the natural log of a nonnegative number (`-inf` for zero)
//! and adds with the stable log-sum-exp rule. The exact backend uses big
//! rationals and is only practical at small depth.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Nonnegative weights closed under addition and multiplication.
pub trait Weight: Clone + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// Natural logarithm, `-inf` for zero.
    fn ln(&self) -> f64;
}

/// `ln(e^a + e^b)` with `-inf` as the log of zero.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// A nonnegative real held as its natural log.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogReal(pub f64);

impl LogReal {
    pub fn from_value(x: f64) -> Self {
        LogReal(x.ln())
    }
}

impl Weight for LogReal {
    fn zero() -> Self {
        LogReal(f64::NEG_INFINITY)
    }
    fn one() -> Self {
        LogReal(0.0)
    }
    #[inline]
    fn add(&self, other: &Self) -> Self {
        LogReal(log_add_exp(self.0, other.0))
    }
    #[inline]
    fn mul(&self, other: &Self) -> Self {
        if self.0 == f64::NEG_INFINITY || other.0 == f64::NEG_INFINITY {
            return LogReal::zero();
        }
        LogReal(self.0 + other.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
    fn ln(&self) -> f64 {
        self.0
    }
}

impl Weight for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn ln(&self) -> f64 {
        ln_rational(self)
    }
}

/// Natural log of a big unsigned integer, accurate to a few ulps at any size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a nonnegative big rational, `-inf` for zero.
pub fn ln_rational(x: &BigRational) -> f64 {
    assert!(!x.is_negative(), "log of a negative weight");
    if Zero::is_zero(x) {
        return f64::NEG_INFINITY;
    }
    ln_biguint(x.numer().magnitude()) - ln_biguint(x.denom().magnitude())
}

/// `a / b` for big unsigned integers rounded to `f64`, without overflow.
pub fn ratio_to_f64(a: &BigUint, b: &BigUint) -> f64 {
    let bits = a.bits().max(b.bits());
    if bits <= 1000 {
        return a.to_f64().unwrap() / b.to_f64().unwrap();
    }
    let shift = bits - 900;
    (a >> shift).to_f64().unwrap() / (b >> shift).to_f64().unwrap()
}

/// Converts a big unsigned integer to `f64` (`inf` past the `f64` range).
pub fn biguint_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Nearest `f64` to a big rational.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if Zero::is_zero(x) {
        return 0.0;
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    sign * ratio_to_f64(x.numer().magnitude(), x.denom().magnitude())
}

/// Parses `"3/2"`, `"-7"`, `"0.125"` or `"1e-3"` exactly into a rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{}{}", int_part, frac_part);
    let mut value = BigRational::from_integer(all.parse::<BigInt>().ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if neg {
        value = -value;
    }
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn log_add_exp_values() {
        // ln(e^0.5 + e^2) and ln(e^12 + e^5), computed in extended precision
        assert!((log_add_exp(0.5, 2.0) - 2.201_413_277_982_752_4).abs() < 4.0 * f64::EPSILON);
        assert!((log_add_exp(12.0, 5.0) - 12.000_911_466_453_774).abs() < 4.0 * 12.0 * f64::EPSILON);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert!((log_add_exp(1e6, 1e6) - (1e6 + std::f64::consts::LN_2)).abs() < 1e-9);
    }

    #[test]
    fn log_real_ops() {
        let a = LogReal::from_value(3.0);
        let b = LogReal::from_value(5.0);
        assert!((a.add(&b).0 - 8f64.ln()).abs() < 1e-15);
        assert!((a.mul(&b).0 - 15f64.ln()).abs() < 1e-15);
        assert!(a.mul(&LogReal::zero()).is_zero());
        assert_eq!(a.add(&LogReal::zero()), a);
    }

    #[test]
    fn big_logs() {
        let x = BigUint::from(2u32).pow(5000);
        assert!((ln_biguint(&x) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_rational(&q(5, 3)) - (5f64 / 3.0).ln()).abs() < 1e-15);
        assert_eq!(ln_rational(&q(0, 1)), f64::NEG_INFINITY);
        let y = BigUint::from(3u32).pow(4000);
        let z = BigUint::from(3u32).pow(4001);
        assert!((ratio_to_f64(&y, &z) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/2"), Some(q(3, 2)));
        assert_eq!(parse_rational("0.125"), Some(q(1, 8)));
        assert_eq!(parse_rational("-7"), Some(q(-7, 1)));
        assert_eq!(parse_rational("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_rational("2.5E2"), Some(q(250, 1)));
        assert_eq!(parse_rational(".5"), Some(q(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("-inf"), None);
        assert_eq!(parse_rational(""), None);
    }
}
