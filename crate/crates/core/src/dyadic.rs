//! Exact dyadic rationals.
//!
//! A [`Dyadic`] is a number of the form `mantissa / 2^exponent`. Every time
//! and overlap that appears in a synchronized schedule is obtained from the
//! input processing times through sums, differences and halvings, so this
//! type is closed under everything the rest of the crate needs and nothing
//! is ever rounded.
//!
//! ```
//! use wsmp::Dyadic;
//!
//! let a: Dyadic = "1/2".parse().unwrap();
//! let b: Dyadic = "1/4".parse().unwrap();
//! assert_eq!((a + b).to_string(), "3/4");
//! assert_eq!(Dyadic::from(5).halve().to_string(), "5/2");
//! ```

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number whose denominator is a power of two.
///
/// The representation is canonical: either the exponent is zero (the value
/// is an integer) or the mantissa is odd. Zero is always `0 / 2^0`. Derived
/// equality and hashing are therefore value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: u32,
}

/// Reasons a dyadic literal can be rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseDyadicError {
    #[error("empty dyadic literal")]
    Empty,
    #[error("invalid numerator in dyadic literal `{0}`")]
    Numerator(String),
    #[error("invalid denominator in dyadic literal `{0}`")]
    Denominator(String),
    #[error("denominator of `{0}` is not a power of two")]
    NotPowerOfTwo(String),
}

impl Dyadic {
    /// Builds `mantissa / 2^exponent` and brings it into canonical form.
    pub fn new(mantissa: impl Into<BigInt>, exponent: u32) -> Self {
        let mut d = Dyadic {
            mantissa: mantissa.into(),
            exponent,
        };
        d.canonicalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic::default()
    }

    pub fn one() -> Self {
        Dyadic::from(1)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// The denominator `2^exponent` as a big integer.
    pub fn denominator(&self) -> BigInt {
        BigInt::one() << self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// `self / 2`.
    pub fn halve(&self) -> Self {
        self.div_pow2(1)
    }

    /// `self / 2^k`.
    pub fn div_pow2(&self, k: u32) -> Self {
        Dyadic::new(self.mantissa.clone(), self.exponent + k)
    }

    /// `self * 2^k`.
    pub fn mul_pow2(&self, k: u32) -> Self {
        if k <= self.exponent {
            Dyadic::new(self.mantissa.clone(), self.exponent - k)
        } else {
            Dyadic::new(&self.mantissa << (k - self.exponent), 0)
        }
    }

    /// `1 / 2^k`.
    pub fn pow2_recip(k: u32) -> Self {
        Dyadic::new(1, k)
    }

    /// Exact integer value, if this is an integer that fits in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        if self.exponent != 0 {
            return None;
        }
        i64::try_from(&self.mantissa).ok()
    }

    fn canonicalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        let shift = tz.min(u64::from(self.exponent)) as u32;
        if shift > 0 {
            self.mantissa >>= shift;
            self.exponent -= shift;
        }
    }

    /// Both mantissas scaled to the larger of the two exponents.
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        match self.exponent.cmp(&other.exponent) {
            Ordering::Equal => (self.mantissa.clone(), other.mantissa.clone(), self.exponent),
            Ordering::Less => (
                &self.mantissa << (other.exponent - self.exponent),
                other.mantissa.clone(),
                other.exponent,
            ),
            Ordering::Greater => (
                self.mantissa.clone(),
                &other.mantissa << (self.exponent - other.exponent),
                self.exponent,
            ),
        }
    }
}

macro_rules! from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Dyadic {
            fn from(v: $t) -> Self {
                Dyadic::new(BigInt::from(v), 0)
            }
        }
    )*};
}
from_int!(i8, i16, i32, i64, i128, u8, u16, u32, u64, u128, usize, isize);

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_ref(a: &Dyadic, b: &Dyadic) -> Dyadic {
    let (x, y, e) = a.aligned(b);
    Dyadic::new(x + y, e)
}

fn sub_ref(a: &Dyadic, b: &Dyadic) -> Dyadic {
    let (x, y, e) = a.aligned(b);
    Dyadic::new(x - y, e)
}

fn mul_ref(a: &Dyadic, b: &Dyadic) -> Dyadic {
    Dyadic::new(&a.mantissa * &b.mantissa, a.exponent + b.exponent)
}

macro_rules! binop {
    ($trait:ident, $method:ident, $f:ident, $assign:ident, $assign_method:ident) => {
        impl $trait<&Dyadic> for &Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &Dyadic) -> Dyadic {
                $f(self, rhs)
            }
        }
        impl $trait<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &Dyadic) -> Dyadic {
                $f(&self, rhs)
            }
        }
        impl $trait<Dyadic> for &Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                $f(self, &rhs)
            }
        }
        impl $assign<&Dyadic> for Dyadic {
            fn $assign_method(&mut self, rhs: &Dyadic) {
                *self = $f(self, rhs);
            }
        }
        impl $assign<Dyadic> for Dyadic {
            fn $assign_method(&mut self, rhs: Dyadic) {
                *self = $f(self, &rhs);
            }
        }
    };
}

binop!(Add, add, add_ref, AddAssign, add_assign);
binop!(Sub, sub, sub_ref, SubAssign, sub_assign);
binop!(Mul, mul, mul_ref, MulAssign, mul_assign);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -self.clone()
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}/{}", self.mantissa, self.denominator())
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

impl FromStr for Dyadic {
    type Err = ParseDyadicError;

    /// Accepts `n`, `n/2^k` and `n/d` with `d` a power of two; `n` may carry
    /// a leading minus sign.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseDyadicError::Empty);
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let (negative, digits) = match num.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, num),
        };
        let mut mantissa =
            parse_digits(digits).ok_or_else(|| ParseDyadicError::Numerator(s.to_string()))?;
        if negative {
            mantissa = -mantissa;
        }
        let exponent = match den {
            None => 0,
            Some(d) => {
                if let Some(k) = d.strip_prefix("2^") {
                    k.parse::<u32>()
                        .map_err(|_| ParseDyadicError::Denominator(s.to_string()))?
                } else {
                    let q = parse_digits(d)
                        .ok_or_else(|| ParseDyadicError::Denominator(s.to_string()))?;
                    if q.sign() != Sign::Plus {
                        return Err(ParseDyadicError::NotPowerOfTwo(s.to_string()));
                    }
                    let tz = q.trailing_zeros().unwrap_or(0);
                    if q != BigInt::one() << tz {
                        return Err(ParseDyadicError::NotPowerOfTwo(s.to_string()));
                    }
                    u32::try_from(tz).map_err(|_| ParseDyadicError::Denominator(s.to_string()))?
                }
            }
        };
        Ok(Dyadic::new(mantissa, exponent))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
