//! Exact angles measured in full turns.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CircleError;

/// An exact rational angle, in units of one full turn.
///
/// Positions on the circle are kept reduced into `[0, 1)` via [`TurnAngle::wrap`].
/// Gaps and move amounts use the same type and may be any rational (a lone
/// robot sees a single gap of exactly one turn).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TurnAngle(BigRational);

impl TurnAngle {
    pub fn zero() -> Self {
        TurnAngle(BigRational::zero())
    }

    pub fn one() -> Self {
        TurnAngle(BigRational::one())
    }

    pub fn half_turn() -> Self {
        TurnAngle::new(1, 2)
    }

    /// `num / den` turns. Panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        TurnAngle(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        TurnAngle(r)
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Reduce modulo one full turn into `[0, 1)`.
    pub fn wrap(&self) -> Self {
        let n = self.0.numer();
        let d = self.0.denom();
        let r = n.mod_floor(d);
        TurnAngle(BigRational::new(r, d.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn half(&self) -> Self {
        TurnAngle(&self.0 / BigInt::from(2))
    }

    pub fn scale(&self, num: i64, den: i64) -> Self {
        TurnAngle(&self.0 * BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn mul(&self, other: &TurnAngle) -> Self {
        TurnAngle(&self.0 * &other.0)
    }

    pub fn midpoint(a: &TurnAngle, b: &TurnAngle) -> Self {
        (a + b).half()
    }

    /// Lossy conversion for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn degrees(&self) -> f64 {
        self.to_f64() * 360.0
    }
}

impl fmt::Display for TurnAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for TurnAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TurnAngle {
    type Err = CircleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CircleError::Parse(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(TurnAngle(BigRational::new(n, d)))
    }
}

impl Serialize for TurnAngle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TurnAngle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&TurnAngle> for &TurnAngle {
            type Output = TurnAngle;
            fn $method(self, rhs: &TurnAngle) -> TurnAngle {
                TurnAngle($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<TurnAngle> for TurnAngle {
            type Output = TurnAngle;
            fn $method(self, rhs: TurnAngle) -> TurnAngle {
                TurnAngle($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&TurnAngle> for TurnAngle {
            type Output = TurnAngle;
            fn $method(self, rhs: &TurnAngle) -> TurnAngle {
                TurnAngle($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<TurnAngle> for &TurnAngle {
            type Output = TurnAngle;
            fn $method(self, rhs: TurnAngle) -> TurnAngle {
                TurnAngle($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);

impl Neg for TurnAngle {
    type Output = TurnAngle;
    fn neg(self) -> TurnAngle {
        TurnAngle(-self.0)
    }
}

impl Neg for &TurnAngle {
    type Output = TurnAngle;
    fn neg(self) -> TurnAngle {
        TurnAngle(-&self.0)
    }
}

impl std::iter::Sum for TurnAngle {
    fn sum<I: Iterator<Item = TurnAngle>>(iter: I) -> Self {
        iter.fold(TurnAngle::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a TurnAngle> for TurnAngle {
    fn sum<I: Iterator<Item = &'a TurnAngle>>(iter: I) -> Self {
        iter.fold(TurnAngle::zero(), |acc, x| acc + x)
    }
}

/// One of the two ways around the circle, relative to whatever frame the
/// caller presents positions in. There is no absolute clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DirectionTag {
    Forward,
    Reverse,
}

impl DirectionTag {
    pub fn opposite(self) -> Self {
        match self {
            DirectionTag::Forward => DirectionTag::Reverse,
            DirectionTag::Reverse => DirectionTag::Forward,
        }
    }

    /// Flip the tag when `flip` is set.
    pub fn flipped_if(self, flip: bool) -> Self {
        if flip {
            self.opposite()
        } else {
            self
        }
    }

    /// Position reached from `from` after travelling `amount` in this direction.
    pub fn advance(self, from: &TurnAngle, amount: &TurnAngle) -> TurnAngle {
        match self {
            DirectionTag::Forward => (from + amount).wrap(),
            DirectionTag::Reverse => (from - amount).wrap(),
        }
    }
}

/// Angular distance travelled from `a` to `b` in direction `d`, in `[0, 1)`.
pub fn angle_between(a: &TurnAngle, b: &TurnAngle, d: DirectionTag) -> TurnAngle {
    match d {
        DirectionTag::Forward => (b - a).wrap(),
        DirectionTag::Reverse => (a - b).wrap(),
    }
}
