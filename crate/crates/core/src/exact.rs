//! Exact rational helpers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}")))
}

/// Nearest float, also for numerators and denominators beyond f64 range.
pub fn to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Keep the top 64 bits of each before dividing.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (r.numer() >> ns as usize).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> ds as usize).to_f64().unwrap_or(f64::NAN);
    // two half-steps so a subnormal result is not flushed by 2^shift alone
    let s = (ns - ds).clamp(-4000, 4000) as i32;
    n / d * 2f64.powi(s / 2) * 2f64.powi(s - s / 2)
}

/// Canonical text form: `n` for integers, `p/q` otherwise.
pub fn to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a rational `p/q` or a decimal (`7`, `-2.75`, `1e-3`) exactly.
pub fn parse(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational number: {text:?}"));
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(all);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

pub fn factorial(n: usize) -> BigRational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    BigRational::from_integer(acc)
}

pub fn abs(r: &BigRational) -> BigRational {
    r.abs()
}

/// A real parameter (alpha, gamma) carried both exactly and as a float.
/// Equality and hashing use the exact value only.
#[derive(Clone)]
pub struct Param {
    exact: BigRational,
    value: f64,
}

impl Param {
    pub fn exact(r: BigRational) -> Self {
        let value = to_f64(&r);
        Self { exact: r, value }
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        Ok(Self {
            exact: from_f64(x)?,
            value: x,
        })
    }

    pub fn rational(&self) -> &BigRational {
        &self.exact
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl PartialEq for Param {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Eq for Param {}

impl std::hash::Hash for Param {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.exact.hash(state);
    }
}

impl fmt::Debug for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", to_string(&self.exact))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", to_string(&self.exact))
    }
}
