//! Exact numbers: rationals, dyadic rationals and symbolic powers of two.

mod dyadic;
mod surd;

pub use dyadic::Dyadic;
pub use surd::{Interval, Surd, SurdSum};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// 2^k as an exact rational, for any integer k.
pub fn pow2(k: i64) -> Q {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Q::from_integer(p)
    } else {
        Q::new(BigInt::one(), p)
    }
}

pub fn pow2_int(k: u64) -> BigInt {
    BigInt::one() << k
}

/// Nearest integer, ties away from zero.
pub fn round_half_away(x: &Q) -> BigInt {
    let two = BigInt::from(2);
    let n = x.numer() * &two + x.denom();
    let d = x.denom() * &two;
    if x.is_negative() {
        -round_half_away(&-x)
    } else {
        n.div_floor(&d)
    }
}

pub fn floor_q(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil_q(x: &Q) -> BigInt {
    x.numer().div_ceil(x.denom())
}

/// ⌈lb n⌉ with the convention ⌈lb 0⌉ = 0.
pub fn ceil_lb(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// ⌊lb n⌋ with ⌊lb 0⌋ = 0.
pub fn floor_lb(n: u64) -> u32 {
    if n == 0 {
        0
    } else {
        63 - n.leading_zeros()
    }
}

/// Number of binary digits of n (0 has none).
pub fn bit_len(n: &BigUint) -> u64 {
    n.bits()
}

/// ⌈lb x⌉ for a positive rational.
pub fn ceil_lb_q(x: &Q) -> i64 {
    assert!(x.is_positive(), "ceil_lb_q of a non-positive value");
    // smallest k with x ≤ 2^k
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    while pow2(k) < *x {
        k += 1;
    }
    while pow2(k - 1) >= *x {
        k -= 1;
    }
    k
}

/// ⌊lb x⌋ for a positive rational.
pub fn floor_lb_q(x: &Q) -> i64 {
    assert!(x.is_positive(), "floor_lb_q of a non-positive value");
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    while pow2(k) > *x {
        k -= 1;
    }
    while pow2(k + 1) <= *x {
        k += 1;
    }
    k
}

pub fn to_u64(n: &BigInt) -> crate::Result<u64> {
    n.to_u64().ok_or_else(|| crate::Error::Overflow {
        value: n.to_string(),
        target: "u64",
    })
}

pub fn biguint_to_u64(n: &BigUint) -> crate::Result<u64> {
    n.to_u64().ok_or_else(|| crate::Error::Overflow {
        value: n.to_string(),
        target: "u64",
    })
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

pub fn is_nonneg_int(x: &BigInt) -> bool {
    x.sign() != Sign::Minus
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses "a", "a/b" or "a/2^k".
pub fn parse_q(s: &str) -> crate::Result<Q> {
    let err = || crate::Error::Parse(format!("not a rational: {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| err())?;
        let b = b.trim();
        let den: BigInt = if let Some(k) = b.strip_prefix("2^") {
            pow2_int(k.parse().map_err(|_| err())?)
        } else {
            b.parse().map_err(|_| err())?
        };
        if den.is_zero() {
            return Err(err());
        }
        Ok(Q::new(num, den))
    } else {
        Ok(Q::from_integer(s.parse().map_err(|_| err())?))
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_ties_away() {
        assert_eq!(round_half_away(&q(1, 2)), BigInt::from(1));
        assert_eq!(round_half_away(&q(-1, 2)), BigInt::from(-1));
        assert_eq!(round_half_away(&q(5, 2)), BigInt::from(3));
        assert_eq!(round_half_away(&q(-5, 2)), BigInt::from(-3));
        assert_eq!(round_half_away(&q(7, 3)), BigInt::from(2));
        assert_eq!(round_half_away(&q(-7, 3)), BigInt::from(-2));
        assert_eq!(round_half_away(&qi(0)), BigInt::from(0));
    }

    #[test]
    fn binary_logs() {
        assert_eq!(ceil_lb(0), 0);
        assert_eq!(ceil_lb(1), 0);
        assert_eq!(ceil_lb(2), 1);
        assert_eq!(ceil_lb(3), 2);
        assert_eq!(ceil_lb(4), 2);
        assert_eq!(ceil_lb(5), 3);
        assert_eq!(floor_lb(1), 0);
        assert_eq!(floor_lb(7), 2);
        assert_eq!(floor_lb(8), 3);
        assert_eq!(ceil_lb_q(&q(1, 2)), -1);
        assert_eq!(ceil_lb_q(&q(3, 4)), 0);
        assert_eq!(ceil_lb_q(&qi(5)), 3);
        assert_eq!(floor_lb_q(&qi(5)), 2);
        assert_eq!(floor_lb_q(&q(3, 8)), -2);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/2^4").unwrap(), q(3, 16));
        assert_eq!(parse_q("-2/6").unwrap(), q(-1, 3));
        assert_eq!(parse_q("7").unwrap(), qi(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }
}
