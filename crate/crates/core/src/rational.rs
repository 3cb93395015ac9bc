//! Helpers around `BigRational`: parsing, formatting, rounding and conversion.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;
use thiserror::Error;

/// Exact rational number used throughout the crate.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{0}` as an exact rational")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"7"`, `"-3/4"` or an exact decimal such as `"0.125"` or `"1e-3"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = t[pos + 1..].parse().map_err(|_| err())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fractional) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fractional.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(fractional.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{whole}{fractional}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    let scale = exponent - fractional.len() as i64;
    let ten = BigInt::from(10u32);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Formats as `"n"` for integers and `"n/d"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Best-effort conversion that survives huge numerators and denominators.
pub fn to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() && (v != 0.0 || q.is_zero()) {
            return v;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift > 0 {
        q / Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        q * Rational::from_integer(BigInt::one() << (-shift) as usize)
    };
    let base = scaled.to_integer().to_f64().unwrap_or(0.0);
    base * 2f64.powi(shift as i32)
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Rounds `q` to `bits` significant binary digits (nearest, ties away from zero).
pub fn round_significant(q: &Rational, bits: u64) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = bits as i64 - (nb - db);
    let scaled = if shift >= 0 {
        q * Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        q / Rational::from_integer(BigInt::one() << (-shift) as usize)
    };
    let rounded = scaled.round().to_integer();
    if shift >= 0 {
        Rational::new(rounded, BigInt::one() << shift as usize)
    } else {
        Rational::from_integer(rounded << (-shift) as usize)
    }
}

pub fn sign(q: &Rational) -> i32 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// `2^e` as an exact rational, for any integer `e`.
pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Largest `e` with `2^e <= |q|`, for nonzero `q`.
pub fn log2_floor(q: &Rational) -> i64 {
    debug_assert!(!q.is_zero());
    let a = q.abs();
    let mut e = a.numer().bits() as i64 - a.denom().bits() as i64;
    while pow2(e) > a {
        e -= 1;
    }
    while pow2(e + 1) <= a {
        e += 1;
    }
    e
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Greatest common divisor of the numerators, over the lcm of denominators.
pub fn content(values: &[Rational]) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in values {
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    Rational::new(num, den)
}
