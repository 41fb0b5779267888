//! Exact rational helpers shared by every layer of the crate.
//!
//! All decisions are made over [`Rational`]; floats only appear when
//! generating random data, and are snapped to a dyadic grid before they
//! enter the decision path.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `7`, `-3/4`, `32.15` or `-.5` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num).ok_or_else(err)?;
        let d = parse_decimal(den).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(err)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numer, denom);
    Some(if neg { -value } else { value })
}

/// Exact decimal text when the denominator has no prime factors besides 2
/// and 5, `p/q` otherwise. Either form reads back with [`parse_rational`].
pub fn to_decimal_string(value: &Rational) -> String {
    let mut den = value.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return value.to_string();
    }
    let places = twos.max(fives);
    if places == 0 {
        return value.numer().to_string();
    }
    let scaled = (value * Rational::from_integer(num_traits::pow(BigInt::from(10), places))).to_integer();
    let digits = scaled.abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (whole, frac) = digits.split_at(digits.len() - places);
    let sign = if value.is_negative() { "-" } else { "" };
    format!("{sign}{whole}.{frac}")
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Rounds a float to the nearest multiple of `2^-bits`.
///
/// Panics on non-finite input.
pub fn snap_f64(x: f64, bits: u32) -> Rational {
    assert!(x.is_finite(), "cannot snap non-finite value {x}");
    let scaled = (x * f64::powi(2.0, bits as i32)).round();
    let numer = BigInt::from(scaled as i128);
    Rational::new(numer, num_traits::pow(BigInt::from(2), bits as usize))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    let p = num_traits::pow(BigInt::from(2), k.unsigned_abs() as usize);
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Smallest integer not below `value`.
pub fn ceil_int(value: &Rational) -> BigInt {
    value.ceil().to_integer()
}

/// The rational with the smallest denominator (then smallest magnitude)
/// inside the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi, "empty interval");
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    if !lo.is_positive() {
        return Rational::zero();
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if &next <= hi {
        return next;
    }
    // lo, hi both strictly inside (fl, fl + 1)
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Encloses `2·atanh(z) = ln((1+z)/(1-z))` for `0 ≤ z < 1` using `terms`
/// terms of the odd power series plus a geometric tail bound.
fn atanh2_enclosure(z: &Rational, terms: usize) -> (Rational, Rational) {
    let z2 = z * z;
    let mut power = z.clone();
    let mut sum = Rational::zero();
    for j in 0..terms {
        sum += &power / int(2 * j as i64 + 1);
        power *= &z2;
    }
    // remainder ≤ z^(2N+1) / ((2N+1)(1 - z²))
    let tail = &power / (int(2 * terms as i64 + 1) * (Rational::one() - &z2));
    let two = int(2);
    (&sum * &two, (sum + tail) * two)
}

/// Rigorous enclosure `[lo, hi]` of `ln(q)` for rational `q > 0`.
pub fn ln_enclosure(q: &Rational, terms: usize) -> (Rational, Rational) {
    assert!(q.is_positive(), "logarithm of non-positive value");
    if q < &Rational::one() {
        let (lo, hi) = ln_enclosure(&q.recip(), terms);
        return (-hi, -lo);
    }
    // q = 2^k · r with r in [1, 2)
    let k = {
        let bits = q.to_integer().bits();
        let mut k = bits.saturating_sub(1) as i64;
        while pow2(k + 1) <= *q {
            k += 1;
        }
        while pow2(k) > *q {
            k -= 1;
        }
        k
    };
    let r = q / pow2(k);
    let z = (&r - Rational::one()) / (&r + Rational::one());
    let (r_lo, r_hi) = atanh2_enclosure(&z, terms);
    let (l2_lo, l2_hi) = atanh2_enclosure(&ratio(1, 3), terms);
    let k = int(k);
    (&k * l2_lo + r_lo, k * l2_hi + r_hi)
}

pub fn gcd_is_one(value: &Rational) -> bool {
    value.numer().gcd(value.denom()).is_one() && value.denom().is_positive()
}
