//! Exact scalar arithmetic.
//!
//! Every weight, length, and payoff in this crate is an arbitrary-precision
//! rational ([`Rational`]); solver paths never touch floating point. Distances
//! additionally carry a symbolic infinitesimal component ([`ExtendedLength`])
//! so that "a point placed immediately after a facility" has an exact,
//! comparable distance.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Exact rational scalar, kept in canonical reduced form with a positive
/// denominator. Serializes as a `"numerator/denominator"` string so JSON
/// output is exact and byte-stable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `n / d`.
    ///
    /// # Panics
    ///
    /// Panics if `d == 0`; a zero denominator is a programming error, not an
    /// input condition (parsing goes through [`FromStr`] which reports it).
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "rational with zero denominator");
        Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// True when the value is an integer (denominator 1 in reduced form).
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Renders the value as a fixed-point decimal with `digits` fractional
    /// digits (round half away from zero). Used only for display surfaces
    /// such as SVG labels; solver paths stay exact.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        // round half away from zero
        let two = BigInt::from(2);
        let (n, d) = (scaled.numer().clone(), scaled.denom().clone());
        let doubled = &n * &two;
        let mut q = &doubled / &d; // truncates toward zero
                                   // adjust: we want round(n/d) = floor(|n|/d + 1/2) with sign
        let r = &doubled % &d;
        if !r.is_zero() {
            if n.is_negative() {
                q -= 1;
            } else {
                q += 1;
            }
        }
        let rounded = q / two;
        let neg = rounded.is_negative();
        let mag = rounded.abs();
        let int_part = &mag / &scale;
        let frac_part = &mag % &scale;
        let frac_str = format!(
            "{:0>width$}",
            frac_part.to_string(),
            width = digits as usize
        );
        let sign = if neg { "-" } else { "" };
        format!("{sign}{int_part}.{frac_str}")
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }
}

/// Parse error for [`Rational`] strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational: {}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `"a/b"` or a bare integer `"a"`. The denominator may not be
    /// zero; signs are normalized into the numerator.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| ParseRationalError(s.to_string()))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| ParseRationalError(s.to_string()))?;
        if d.is_zero() {
            return Err(ParseRationalError(format!("{s} (zero denominator)")));
        }
        Ok(Rational(BigRational::new(n, d)))
    }
}

impl fmt::Display for Rational {
    /// Canonical form: always `numerator/denominator`, denominator positive.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

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
        let mut acc = Rational::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        let mut acc = Rational::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// Convenience constructor: `rat!(1, 2)` is 1/2, `rat!(3)` is 3.
#[macro_export]
macro_rules! rat {
    ($n:expr) => {
        $crate::scalar::Rational::from($n as i64)
    };
    ($n:expr, $d:expr) => {
        $crate::scalar::Rational::new($n as i64, $d as i64)
    };
}

/// A length with a symbolic infinitesimal component: `real + eps·ε` where ε
/// is an arbitrarily small positive unit. Ordering is lexicographic on
/// `(real, eps)` and addition/subtraction act componentwise, which is exactly
/// the arithmetic shortest-path distances need when placements sit
/// infinitesimally past a facility.
///
/// The coefficient is itself a rational: halving (bisector midpoints) must
/// stay closed under the arithmetic. Points serialized to JSON only ever
/// carry integer coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExtendedLength {
    pub real: Rational,
    pub eps: Rational,
}

impl ExtendedLength {
    pub fn new(real: Rational, eps: Rational) -> Self {
        ExtendedLength { real, eps }
    }

    /// A purely real length (zero infinitesimal part).
    pub fn from_real(real: Rational) -> Self {
        ExtendedLength {
            real,
            eps: Rational::zero(),
        }
    }

    /// `real + k·ε` with an integer coefficient.
    pub fn with_eps_units(real: Rational, k: i64) -> Self {
        ExtendedLength {
            real,
            eps: Rational::from(k),
        }
    }

    pub fn zero() -> Self {
        ExtendedLength::default()
    }

    pub fn is_zero(&self) -> bool {
        self.real.is_zero() && self.eps.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.eps.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        *self < ExtendedLength::zero()
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn halve(&self) -> Self {
        let two = Rational::from(2);
        ExtendedLength {
            real: &self.real / &two,
            eps: &self.eps / &two,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<Rational> for ExtendedLength {
    fn from(r: Rational) -> Self {
        ExtendedLength::from_real(r)
    }
}

macro_rules! extlen_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExtendedLength {
            type Output = ExtendedLength;
            fn $method(self, rhs: ExtendedLength) -> ExtendedLength {
                ExtendedLength {
                    real: (self.real).$method(rhs.real),
                    eps: (self.eps).$method(rhs.eps),
                }
            }
        }
        impl $trait<&ExtendedLength> for ExtendedLength {
            type Output = ExtendedLength;
            fn $method(self, rhs: &ExtendedLength) -> ExtendedLength {
                ExtendedLength {
                    real: (self.real).$method(&rhs.real),
                    eps: (self.eps).$method(&rhs.eps),
                }
            }
        }
        impl $trait<ExtendedLength> for &ExtendedLength {
            type Output = ExtendedLength;
            fn $method(self, rhs: ExtendedLength) -> ExtendedLength {
                ExtendedLength {
                    real: (&self.real).$method(rhs.real),
                    eps: (&self.eps).$method(rhs.eps),
                }
            }
        }
        impl $trait<&ExtendedLength> for &ExtendedLength {
            type Output = ExtendedLength;
            fn $method(self, rhs: &ExtendedLength) -> ExtendedLength {
                ExtendedLength {
                    real: (&self.real).$method(&rhs.real),
                    eps: (&self.eps).$method(&rhs.eps),
                }
            }
        }
    };
}

extlen_binop!(Add, add);
extlen_binop!(Sub, sub);

impl Neg for ExtendedLength {
    type Output = ExtendedLength;
    fn neg(self) -> ExtendedLength {
        ExtendedLength {
            real: -self.real,
            eps: -self.eps,
        }
    }
}

impl Neg for &ExtendedLength {
    type Output = ExtendedLength;
    fn neg(self) -> ExtendedLength {
        ExtendedLength {
            real: -&self.real,
            eps: -&self.eps,
        }
    }
}

impl AddAssign<&ExtendedLength> for ExtendedLength {
    fn add_assign(&mut self, rhs: &ExtendedLength) {
        self.real += &rhs.real;
        self.eps += &rhs.eps;
    }
}

impl fmt::Display for ExtendedLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.eps.is_zero() {
            write!(f, "{}", self.real)
        } else if self.eps.is_negative() {
            write!(f, "{}-{}ε", self.real, self.eps.abs())
        } else {
            write!(f, "{}+{}ε", self.real, self.eps)
        }
    }
}

impl fmt::Debug for ExtendedLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
