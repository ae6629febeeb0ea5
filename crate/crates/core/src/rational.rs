//! Exact rational scalars used throughout the expression core.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Construction goes through [`rat`] / [`rat_big`] so
//! the normalisation invariant holds everywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Builds `n / d` in lowest terms. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds `n / d` from big integers. Panics when `d == 0`.
pub fn rat_big(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Lossy conversion for numeric evaluation. Values outside the f64 range
/// saturate to infinity, mirroring IEEE semantics.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Greatest common divisor on nonnegative rationals:
/// gcd(a/b, c/d) = gcd(a, c) / lcm(b, d). gcd(0, x) = x.
pub fn rat_gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let n = a.numer().abs().gcd(&b.numer().abs());
    let d = a.denom().lcm(b.denom());
    Rational::new(n, d)
}

/// True when the rational is an integer that fits the given power-folding
/// budget; used to keep constant folding away from absurd exponents.
pub fn small_integer(r: &Rational, limit: i64) -> Option<i64> {
    if !r.is_integer() {
        return None;
    }
    let i = r.numer().to_i64()?;
    if i.abs() <= limit {
        Some(i)
    } else {
        None
    }
}

/// Exact integer power of a rational, with negative exponents allowed for
/// nonzero bases.
pub fn rat_pow(base: &Rational, exp: i64) -> Option<Rational> {
    if base.is_zero() {
        return if exp > 0 {
            Some(Rational::zero())
        } else if exp == 0 {
            Some(Rational::one())
        } else {
            None
        };
    }
    let mag = base.pow(exp.unsigned_abs() as u32 as i32);
    if exp >= 0 {
        Some(mag)
    } else {
        Some(mag.recip())
    }
}

/// Parses a decimal literal ("7.25") into an exact rational.
pub fn rat_from_decimal(whole: &str, frac: &str) -> Option<Rational> {
    let w: BigInt = whole.parse().ok()?;
    if frac.is_empty() {
        return Some(Rational::from_integer(w));
    }
    let f: BigInt = frac.parse().ok()?;
    let scale = BigInt::from(10).pow(frac.len() as u32);
    Some(Rational::from_integer(w) + Rational::new(f, scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let r = rat(6, -4);
        assert_eq!(r, rat(-3, 2));
        assert!(r.denom() > &BigInt::zero());
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn gcd_of_rationals() {
        assert_eq!(rat_gcd(&rat(1, 2), &rat(1, 3)), rat(1, 6));
        assert_eq!(rat_gcd(&rat(4, 1), &rat(6, 1)), rat(2, 1));
        assert_eq!(rat_gcd(&rat(0, 1), &rat(-5, 3)), rat(5, 3));
    }

    #[test]
    fn integer_powers() {
        assert_eq!(rat_pow(&rat(2, 3), 2), Some(rat(4, 9)));
        assert_eq!(rat_pow(&rat(2, 3), -1), Some(rat(3, 2)));
        assert_eq!(rat_pow(&rat(0, 1), -1), None);
        assert_eq!(rat_pow(&rat(0, 1), 0), Some(rat(1, 1)));
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(rat_from_decimal("7", "3"), Some(rat(73, 10)));
        assert_eq!(rat_from_decimal("0", "25"), Some(rat(1, 4)));
        assert_eq!(rat_from_decimal("12", ""), Some(rat_int(12)));
    }
}
