//! Scalars that remember whether they are exact.
//!
//! Every quantity in an instance (biases, weights, the unlabeled cost) is a
//! [`Number`]: a double together with an optional exact rational. When every
//! input of an instance is exact, stability comparisons run in rational
//! arithmetic and cannot flip on rounding; otherwise they fall back to `f64`
//! with a relative tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{BlottoError, Result};

/// Relative tolerance for the floating-point improvement test.
pub const FLOAT_IMPROVEMENT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Number {
    approx: f64,
    exact: Option<BigRational>,
}

impl Number {
    pub fn float(value: f64) -> Self {
        Number { approx: value, exact: None }
    }

    pub fn integer(value: i64) -> Self {
        Number::rational(BigRational::from_integer(BigInt::from(value)))
    }

    /// Exact `numer / denom`. Panics on a zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Number::rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn rational(value: BigRational) -> Self {
        let approx = value.to_f64().unwrap_or(f64::NAN);
        Number { approx, exact: Some(value) }
    }

    /// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.25"`.
    /// All three forms are exact.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || BlottoError::Parse(format!("not a rational number: {text:?}"));
        if let Some((p, q)) = text.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Number::rational(BigRational::new(p, q)));
        }
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
        if (int_part.is_empty() && frac_part.is_empty()) || !digits_ok(int_part) || !digits_ok(frac_part) {
            return Err(bad());
        }
        let mantissa: BigInt = format!("{}{}", if int_part.is_empty() { "0" } else { int_part }, frac_part)
            .parse()
            .map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = BigRational::new(mantissa, scale);
        Ok(Number::rational(if negative { -value } else { value }))
    }

    pub fn to_f64(&self) -> f64 {
        self.approx
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_finite(&self) -> bool {
        self.exact.is_some() || self.approx.is_finite()
    }

    pub fn is_integer(&self) -> bool {
        self.exact.as_ref().is_some_and(|r| r.is_integer())
    }

    pub fn abs(&self) -> Number {
        self.map(|r| r.abs(), f64::abs)
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(r) => r.is_zero(),
            None => self.approx == 0.0,
        }
    }

    pub fn signum(&self) -> Ordering {
        self.partial_cmp(&Number::integer(0)).unwrap_or(Ordering::Equal)
    }

    fn map(&self, exact: impl Fn(&BigRational) -> BigRational, approx: impl Fn(f64) -> f64) -> Number {
        match &self.exact {
            Some(r) => Number::rational(exact(r)),
            None => Number::float(approx(self.approx)),
        }
    }

    fn zip(
        &self,
        other: &Number,
        exact: impl Fn(&BigRational, &BigRational) -> BigRational,
        approx: impl Fn(f64, f64) -> f64,
    ) -> Number {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Number::rational(exact(a, b)),
            _ => Number::float(approx(self.approx, other.approx)),
        }
    }

    pub fn max(self, other: Number) -> Number {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Number) -> Number {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl From<f64> for Number {
    fn from(value: f64) -> Self {
        Number::float(value)
    }
}

impl From<i64> for Number {
    fn from(value: i64) -> Self {
        Number::integer(value)
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.approx == other.approx,
        }
    }
}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.cmp(b)),
            _ => self.approx.partial_cmp(&other.approx),
        }
    }
}

macro_rules! number_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Number {
            type Output = Number;
            fn $method(self, rhs: &Number) -> Number {
                self.zip(rhs, |a, b| a $op b, |a, b| a $op b)
            }
        }
        impl $trait for Number {
            type Output = Number;
            fn $method(self, rhs: Number) -> Number {
                (&self).$method(&rhs)
            }
        }
    };
}

number_binop!(Add, add, +);
number_binop!(Sub, sub, -);
number_binop!(Mul, mul, *);
number_binop!(Div, div, /);

impl Neg for Number {
    type Output = Number;
    fn neg(self) -> Number {
        self.map(|r| -r, |x| -x)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{}", self.approx),
        }
    }
}

/// Arithmetic the cost evaluator is generic over.
pub(crate) trait Scalar:
    Clone
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn zero() -> Self;
    fn from_count(count: u64) -> Self;
    fn from_number(value: &Number) -> Self;
    fn abs_value(&self) -> Self;
    fn into_number(self) -> Number;
    /// Whether changing a cost of `before` by `delta` is a strict improvement.
    fn improves(delta: &Self, before: &Self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_count(count: u64) -> Self {
        count as f64
    }
    fn from_number(value: &Number) -> Self {
        value.to_f64()
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn into_number(self) -> Number {
        Number::float(self)
    }
    fn improves(delta: &Self, before: &Self) -> bool {
        -delta > FLOAT_IMPROVEMENT_TOLERANCE * (1.0 + before.abs())
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_count(count: u64) -> Self {
        BigRational::from_integer(BigInt::from(count))
    }
    fn from_number(value: &Number) -> Self {
        value
            .exact()
            .cloned()
            .expect("exact evaluation requested for an inexact number")
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn into_number(self) -> Number {
        Number::rational(self)
    }
    fn improves(delta: &Self, _before: &Self) -> bool {
        delta.is_negative()
    }
}

pub(crate) fn half<T: Scalar>() -> T {
    T::from_count(1) / T::from_count(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(Number::parse("3/4").unwrap(), Number::ratio(3, 4));
        assert_eq!(Number::parse("-0.25").unwrap(), Number::ratio(-1, 4));
        assert_eq!(Number::parse("7").unwrap(), Number::integer(7));
        assert_eq!(Number::parse(" 6/-4 ").unwrap(), Number::ratio(-3, 2));
        assert!(Number::parse("0.3").unwrap().is_exact());
        assert_eq!(Number::parse("0.3").unwrap(), Number::ratio(3, 10));
        assert_eq!(Number::parse(".5").unwrap(), Number::ratio(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1.2.3", "1e5", "--1", "."] {
            assert!(Number::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exactness_propagates() {
        let a = Number::ratio(1, 3);
        let b = Number::ratio(2, 3);
        assert!((&a + &b).is_exact());
        assert_eq!(&a + &b, Number::integer(1));
        let c = Number::float(0.5);
        assert!(!(&a + &c).is_exact());
    }

    #[test]
    fn display_round_trips() {
        for n in [Number::ratio(-7, 3), Number::integer(4), Number::ratio(3, 10)] {
            assert_eq!(Number::parse(&n.to_string()).unwrap(), n);
        }
        assert_eq!(Number::float(0.5).to_string(), "0.5");
    }

    #[test]
    fn float_improvement_tolerance() {
        assert!(!<f64 as Scalar>::improves(&-1e-13, &1.0));
        assert!(<f64 as Scalar>::improves(&-1e-9, &1.0));
        assert!(!<f64 as Scalar>::improves(&0.0, &0.0));
    }
}
