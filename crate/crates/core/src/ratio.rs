//! Exact rational numbers for metric values.
//!
//! Every metric in this crate is a ratio of counts, so all values are carried
//! as arbitrary-precision rationals in lowest terms. The text form is always
//! `p/q`, including integers (`4/1`), so reports can be compared byte for byte.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseRatioError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactRatio(BigRational);

impl ExactRatio {
    /// Builds `numerator / denominator`, reducing to lowest terms.
    ///
    /// Panics if `denominator` is zero.
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Self {
        let denominator = denominator.into();
        assert!(!denominator.is_zero(), "ExactRatio with zero denominator");
        ExactRatio(BigRational::new(numerator.into(), denominator))
    }

    /// Like [`ExactRatio::new`] but returns `None` on a zero denominator.
    pub fn checked_new(
        numerator: impl Into<BigInt>,
        denominator: impl Into<BigInt>,
    ) -> Option<Self> {
        let denominator = denominator.into();
        if denominator.is_zero() {
            None
        } else {
            Some(ExactRatio(BigRational::new(numerator.into(), denominator)))
        }
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        ExactRatio(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        ExactRatio(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRatio(BigRational::one())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn checked_div(&self, other: &ExactRatio) -> Option<ExactRatio> {
        if other.is_zero() {
            None
        } else {
            Some(ExactRatio(&self.0 / &other.0))
        }
    }

    /// Lossy decimal rendering, for display only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `floor(self * count)` clamped to `0..=count`.
    ///
    /// Used to turn a tolerance such as `eps_c` into the number of datapoints
    /// that may miss, so that `count - misses >= (1 - eps) * count` holds exactly.
    pub fn allowance(&self, count: usize) -> usize {
        let scaled = (&self.0 * BigRational::from_integer(BigInt::from(count)))
            .floor()
            .to_integer();
        if scaled.is_negative() {
            0
        } else {
            scaled.to_usize().unwrap_or(usize::MAX).min(count)
        }
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRatio {
    fn from(value: BigRational) -> Self {
        ExactRatio(value)
    }
}

impl From<ExactRatio> for BigRational {
    fn from(value: ExactRatio) -> Self {
        value.0
    }
}

impl PartialOrd for ExactRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRatio {
            type Output = ExactRatio;
            fn $method(self, rhs: ExactRatio) -> ExactRatio {
                ExactRatio(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRatio> for &'a ExactRatio {
            type Output = ExactRatio;
            fn $method(self, rhs: &'a ExactRatio) -> ExactRatio {
                ExactRatio((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRatio {
    type Output = ExactRatio;
    fn neg(self) -> ExactRatio {
        ExactRatio(-self.0)
    }
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for ExactRatio {
    type Err = ParseRatioError;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let bad = || ParseRatioError(s.to_string());
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        ExactRatio::checked_new(num, den).ok_or_else(bad)
    }
}

impl Serialize for ExactRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRatio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
