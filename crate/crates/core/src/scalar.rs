//! Exact rational scalars used for every time, distance and coordinate.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarParseError {
    #[error("empty number")]
    Empty,
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("malformed number `{0}`")]
    Malformed(String),
}

/// An arbitrary-precision rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact conversion of a finite float (every finite f64 is a dyadic rational).
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Scalar)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }

    pub fn floor(&self) -> Self {
        Scalar(self.0.floor())
    }

    pub fn square(&self) -> Self {
        Scalar(&self.0 * &self.0)
    }

    /// Exact square root, or `None` when the value is negative or not the
    /// square of a rational.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let num = self.0.numer();
        let den = self.0.denom();
        let rn = num.sqrt();
        let rd = den.sqrt();
        if &(&rn * &rn) == num && &(&rd * &rd) == den {
            Some(Scalar(BigRational::new(rn, rd)))
        } else {
            None
        }
    }

    /// Rational approximation of the square root, accurate to well below
    /// `tolerance` (Newton iteration on rationals, seeded from f64).
    pub fn sqrt_approx(&self, tolerance: &Scalar) -> Self {
        if let Some(r) = self.sqrt_exact() {
            return r;
        }
        let seed = self.to_f64().sqrt();
        let mut x = Scalar::from_f64(seed).unwrap_or_else(Scalar::one);
        if !x.is_positive() {
            x = Scalar::one();
        }
        let two = Scalar::from_int(2);
        let tol = if tolerance.is_positive() {
            tolerance.clone() / Scalar::from_int(1_000)
        } else {
            Scalar::ratio(1, 1_000_000_000_000)
        };
        for _ in 0..8 {
            let next = (x.clone() + self.clone() / x.clone()) / two.clone();
            let err = (next.clone() * next.clone() - self.clone()).abs();
            x = Scalar::limit_denominator(&next, 1u64 << 48);
            if err <= tol {
                break;
            }
        }
        x
    }

    /// Closest fraction with denominator at most `max_den` (continued fractions).
    pub fn limit_denominator(value: &Scalar, max_den: u64) -> Scalar {
        let max_den = BigInt::from(max_den);
        if value.0.denom() <= &max_den {
            return value.clone();
        }
        let (mut p0, mut q0, mut p1, mut q1) =
            (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
        let mut n = value.0.numer().clone();
        let mut d = value.0.denom().clone();
        loop {
            let a = n.div_floor_big(&d);
            let q2 = &q0 + &a * &q1;
            if q2 > max_den {
                break;
            }
            let p2 = &p0 + &a * &p1;
            p0 = std::mem::replace(&mut p1, p2);
            q0 = std::mem::replace(&mut q1, q2);
            let r = &n - &a * &d;
            n = std::mem::replace(&mut d, r);
            if d.is_zero() {
                break;
            }
        }
        if q1.is_zero() {
            return value.clone();
        }
        Scalar(BigRational::new(p1, q1))
    }

    /// Canonical text form: `p` for integers, `p/q` otherwise.
    pub fn to_fraction_string(&self) -> String {
        if self.0.is_integer() {
            self.0.numer().to_string()
        } else {
            format!("{}/{}", self.0.numer(), self.0.denom())
        }
    }

    /// Decimal rendering with up to `digits` fractional digits, truncated toward zero.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let neg = self.is_negative();
        let abs = self.0.abs();
        let int_part = abs.trunc();
        let mut frac = abs - &int_part;
        let mut out = String::new();
        if neg && !self.is_zero() {
            out.push('-');
        }
        out.push_str(&int_part.numer().to_string());
        if digits > 0 && !frac.is_zero() {
            out.push('.');
            let ten = BigRational::from_integer(BigInt::from(10));
            let mut written = String::new();
            for _ in 0..digits {
                frac *= &ten;
                let d = frac.trunc();
                written.push_str(&d.numer().to_string());
                frac -= d;
                if frac.is_zero() {
                    break;
                }
            }
            out.push_str(&written);
        }
        out
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

trait DivFloorBig {
    fn div_floor_big(&self, other: &BigInt) -> BigInt;
}

impl DivFloorBig for BigInt {
    fn div_floor_big(&self, other: &BigInt) -> BigInt {
        num_integer::Integer::div_floor(self, other)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fraction_string())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fraction_string())
    }
}

impl FromStr for Scalar {
    type Err = ScalarParseError;

    /// Accepts `p/q`, integers, and plain or scientific decimals (`0.25`, `3e8`).
    /// Decimals are converted exactly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ScalarParseError::Empty);
        }
        if let Some((n, d)) = s.split_once('/') {
            let num = parse_decimal(n.trim()).ok_or_else(|| ScalarParseError::Malformed(s.into()))?;
            let den = parse_decimal(d.trim()).ok_or_else(|| ScalarParseError::Malformed(s.into()))?;
            if den.is_zero() {
                return Err(ScalarParseError::ZeroDenominator(s.into()));
            }
            return Ok(Scalar(num / den));
        }
        parse_decimal(s)
            .map(Scalar)
            .ok_or_else(|| ScalarParseError::Malformed(s.into()))
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigInt::parse_bytes(all.as_bytes(), 10)?;
    if neg {
        value = -value;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(value * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(value, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScalarVisitor;

        impl serde::de::Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a rational string such as \"3/10\"")
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar::from_int(v))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Scalar, E> {
                Err(E::custom(format!("float {v} is not exact; write it as a string, e.g. \"{v}\" or \"p/q\"")))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Scalar, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                Scalar((&self.0).$m(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                Scalar(self.0.$m(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

/// Total order helper for comparing against zero without allocating.
pub fn sign(x: &Scalar) -> Ordering {
    match x.as_big().numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(s("3/6"), Scalar::ratio(1, 2));
        assert_eq!(s("-7"), Scalar::from_int(-7));
        assert_eq!(s("0.25"), Scalar::ratio(1, 4));
        assert_eq!(s("3e8"), Scalar::from_int(300_000_000));
        assert_eq!(s("1.5e-3"), Scalar::ratio(3, 2000));
        assert_eq!(s("2/0.5"), Scalar::from_int(4));
    }

    #[test]
    fn rejects_zero_denominator_and_garbage() {
        assert!(matches!("3/0".parse::<Scalar>(), Err(ScalarParseError::ZeroDenominator(_))));
        assert!("abc".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
        assert!("1/2/3".parse::<Scalar>().is_err());
    }

    #[test]
    fn fraction_string_round_trips() {
        for x in ["0", "5", "-3/7", "1000/3"] {
            assert_eq!(s(x).to_fraction_string(), x);
        }
    }

    #[test]
    fn exact_sqrt_only_for_rational_squares() {
        assert_eq!(s("25").sqrt_exact(), Some(s("5")));
        assert_eq!(s("9/4").sqrt_exact(), Some(s("3/2")));
        assert_eq!(s("2").sqrt_exact(), None);
        assert_eq!(s("-4").sqrt_exact(), None);
    }

    #[test]
    fn approx_sqrt_is_close() {
        let r = s("2").sqrt_approx(&s("1/1000000"));
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(s("1000/3").to_decimal_string(3), "333.333");
        assert_eq!(s("-1/4").to_decimal_string(6), "-0.25");
        assert_eq!(s("7").to_decimal_string(6), "7");
    }
}
