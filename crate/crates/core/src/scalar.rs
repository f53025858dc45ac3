//! Number types the library is generic over.
//!
//! Every kernel is written once against [`Scalar`] and instantiated either with
//! exact big rationals ([`Rational`]) or with `f64`. The arithmetic mode is fixed
//! when values are constructed; the two never mix.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Exact rational number.
pub type Rational = BigRational;

/// A field element usable by every kernel in this crate.
pub trait Scalar: Clone + Debug + Display + PartialOrd + Send + Sync + 'static + Num + Signed {
    /// `true` when arithmetic is exact and all tolerances default to zero.
    const EXACT: bool;

    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// `n / d`, exact in rational mode.
    fn ratio(n: i64, d: i64) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::ratio(n as i64, 1)
    }

    /// Parses `"p/q"` fractions and plain decimals (`"0.25"`, `"-1e-3"`).
    /// Decimals are read exactly in rational mode.
    fn parse_value(text: &str) -> Option<Self>;

    /// Canonical text form: `"p/q"` in rational mode, shortest round-trip
    /// decimal for floats.
    fn to_text(&self) -> String;

    fn default_tolerance() -> Tolerance<Self>;

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

/// Comparison slack for normalization, entrywise equality and LP feasibility.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerance<T> {
    pub sum: T,
    pub eq: T,
    pub lp: T,
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        T::default_tolerance()
    }
}

impl<T: Scalar> Tolerance<T> {
    /// Exact comparisons everywhere.
    pub fn zero() -> Self {
        Tolerance {
            sum: T::zero(),
            eq: T::zero(),
            lp: T::zero(),
        }
    }

    /// Overrides the entrywise-equality and LP slack, keeping `sum`.
    pub fn with_eq_lp(mut self, eps: T) -> Self {
        self.eq = eps.clone();
        self.lp = eps;
        self
    }

    pub fn is_valid(&self) -> bool {
        !self.sum.is_negative() && !self.eq.is_negative() && !self.lp.is_negative()
    }

    pub fn eq_within(&self, a: &T, b: &T) -> bool {
        (a.clone() - b.clone()).abs() <= self.eq
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn parse_value(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            Some((n, d)) => {
                let n: f64 = n.trim().parse().ok()?;
                let d: f64 = d.trim().parse().ok()?;
                if d == 0.0 {
                    None
                } else {
                    Some(n / d)
                }
            }
            None => text.parse().ok().filter(|x: &f64| x.is_finite()),
        }
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }

    fn default_tolerance() -> Tolerance<Self> {
        Tolerance {
            sum: 1e-12,
            eq: 1e-9,
            lp: 1e-9,
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_f64(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn parse_value(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).ok()?;
                let d = BigInt::from_str(d.trim()).ok()?;
                if d.is_zero() {
                    None
                } else {
                    Some(BigRational::new(n, d))
                }
            }
            None => parse_decimal(text),
        }
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn default_tolerance() -> Tolerance<Self> {
        Tolerance::zero()
    }
}

/// Exact value of a decimal literal such as `-12.5e-3`.
fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}
