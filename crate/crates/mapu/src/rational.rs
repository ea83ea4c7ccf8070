//! Exact arbitrary-precision rational arithmetic.
//!
//! Every numeric quantity in this crate (costs, demands, objective values,
//! penalties) is a [`Rational`]. There is no floating point anywhere: the
//! solver compares objective values and Lagrangian penalties for *exact*
//! equality, and any rounding would corrupt its termination and optimality
//! logic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Exact signed rational number, always in lowest terms with a positive
/// denominator. Arithmetic (`+`, `-`, `*`, `/`, comparisons) is exact.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Zero.
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    /// One.
    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `numer / denom` from machine integers.
    ///
    /// # Panics
    /// Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "denominator must be non-zero");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Exact ratio of two big integers.
    ///
    /// # Panics
    /// Panics if `denom` is zero.
    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "denominator must be non-zero");
        Rational(BigRational::new(numer, denom))
    }

    /// Numerator in lowest terms (sign lives here).
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator in lowest terms; always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True when the value is an integer (denominator 1).
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Decimal approximation with exactly `places` fractional digits,
    /// rounded half away from zero. This is the only place the crate turns a
    /// rational into a decimal, and it is for *display only*.
    pub fn to_decimal_string(&self, places: usize) -> String {
        let scale = BigInt::from(10u32).pow(places as u32);
        let scaled_num = self.numer() * &scale;
        let denom = self.denom();
        // round(scaled_num / denom) half away from zero
        let (mut quot, rem) = scaled_num.div_rem(denom);
        if &rem.abs() * 2 >= *denom {
            if scaled_num.is_negative() {
                quot -= 1;
            } else {
                quot += 1;
            }
        }
        let sign = if quot.is_negative() { "-" } else { "" };
        let digits = quot.abs().to_string();
        if places == 0 {
            return format!("{sign}{digits}");
        }
        let padded = format!("{digits:0>width$}", width = places + 1);
        let split = padded.len() - places;
        format!("{sign}{}.{}", &padded[..split], &padded[split..])
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }
}

impl From<usize> for Rational {
    fn from(v: usize) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational(BigRational::from_integer(v))
    }
}

/// Parse failure for [`Rational::from_str`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational: {}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts three exact forms:
    /// * integers: `42`, `-7`
    /// * decimals with optional exponent: `0.9`, `22.8`, `-1.25e2`
    /// * fractions: `9/10`, `-3/4`
    ///
    /// All are converted exactly; `0.9` becomes 9/10, never a float.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError("empty string".into()));
        }
        if let Some((numer, denom)) = s.split_once('/') {
            let n = parse_bigint(numer.trim())
                .ok_or_else(|| ParseRationalError(format!("bad numerator in `{s}`")))?;
            let d = parse_bigint(denom.trim())
                .ok_or_else(|| ParseRationalError(format!("bad denominator in `{s}`")))?;
            if d.is_zero() {
                return Err(ParseRationalError(format!("zero denominator in `{s}`")));
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        parse_decimal(s).ok_or_else(|| ParseRationalError(format!("`{s}` is not a number")))
    }
}

fn parse_bigint(s: &str) -> Option<BigInt> {
    if s.is_empty() {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

/// Parse `[+-]?digits[.digits][eE[+-]?digits]` into an exact rational.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().ok()?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut numer = BigInt::parse_bytes(joined.as_bytes(), 10)?;
    if sign < 0 {
        numer = -numer;
    }
    // value = numer * 10^(exponent - frac_len)
    let shift = exponent - frac_part.len() as i64;
    let pow = BigInt::from(10u32).pow(shift.unsigned_abs() as u32);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * pow)
    } else {
        BigRational::new(numer, pow)
    };
    Some(Rational(value))
}

impl fmt::Display for Rational {
    /// `"5"` for integers, `"9/2"` otherwise. `Display` output re-parses to
    /// the identical value via `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serializes as the exact `Display` string (`"9/2"`), never as a float.
impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);
impl_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.is_integer() && self.numer().to_i64() == Some(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}
