use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{0}` as an exact rational")]
pub struct ParseRationalError(pub String);

/// Integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q`, an integer, or a plain decimal such as `-1.25`.
///
/// Decimals are converted digit for digit, so `0.1` is exactly `1/10`.
pub fn parse(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    let err = || ParseRationalError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if !digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || (digits.is_empty() && frac.is_empty())
        {
            return Err(err());
        }
        let mantissa = format!("{digits}{frac}");
        let mut num = BigInt::from_str(if mantissa.is_empty() { "0" } else { &mantissa })
            .map_err(|_| err())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| err())
}

/// `p/q`, or just `p` for integers.
pub fn format(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// `{"num": p, "den": q}` with plain JSON numbers whenever they fit in an `i64`.
pub fn to_json(v: &Rational) -> serde_json::Value {
    fn component(b: &BigInt) -> serde_json::Value {
        match b.to_i64() {
            Some(x) => serde_json::Value::from(x),
            None => serde_json::Value::from(b.to_string()),
        }
    }
    serde_json::json!({ "num": component(v.numer()), "den": component(v.denom()) })
}

pub fn is_integer(v: &Rational) -> bool {
    v.denom().is_one()
}

pub fn is_nonnegative(v: &Rational) -> bool {
    !v.is_negative()
}
