//! Exact coefficient rings.
//!
//! Module elements, brackets and ideal machinery are written once against
//! [`Coefficient`] and instantiated for arbitrary-precision integers (`Z`) and
//! rationals (`Q`). Floating-point scalars are deliberately not supported:
//! every identity checked by this crate is an exact equality.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tag naming the coefficient ring of a module element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ring {
    #[serde(rename = "Z")]
    Integer,
    #[serde(rename = "Q")]
    Rational,
}

impl Ring {
    pub fn symbol(self) -> &'static str {
        match self {
            Ring::Integer => "Z",
            Ring::Rational => "Q",
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" => Ok(Ring::Integer),
            "Q" => Ok(Ring::Rational),
            other => Err(Error::Parse(format!("unknown ring `{other}`"))),
        }
    }
}

impl Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An exact commutative coefficient ring.
pub trait Coefficient:
    Num + Signed + Clone + Debug + Display + Eq + Ord + Send + Sync + 'static
{
    const RING: Ring;

    /// The image of an integer under the unique ring map `Z -> Self`.
    fn from_integer(n: &BigInt) -> Self;

    /// Parses the textual coefficient form: a decimal integer, or `p/q` for
    /// rational rings.
    fn parse_coefficient(s: &str) -> Result<Self>;
}

/// Coefficient rings in which every nonzero element is invertible.
pub trait Field: Coefficient {}

impl Coefficient for BigInt {
    const RING: Ring = Ring::Integer;

    fn from_integer(n: &BigInt) -> Self {
        n.clone()
    }

    fn parse_coefficient(s: &str) -> Result<Self> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid integer coefficient `{s}`")))
    }
}

impl Coefficient for BigRational {
    const RING: Ring = Ring::Rational;

    fn from_integer(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn parse_coefficient(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid rational coefficient `{s}`"));
        match s.split_once('/') {
            None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
            Some((num, den)) => {
                let num: BigInt = num.parse().map_err(|_| bad())?;
                let den: BigInt = den.parse().map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(num, den))
            }
        }
    }
}

impl Field for BigRational {}

/// Embeds an integer coefficient into the rationals.
pub fn promote(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// `true` when `divisor` divides `value` in `Z`; zero divides only zero.
pub fn divides(divisor: &BigInt, value: &BigInt) -> bool {
    if divisor.is_zero() {
        value.is_zero()
    } else {
        (value % divisor).is_zero()
    }
}

/// Nonnegative gcd of a list of integers; the empty list and the all-zero list
/// both give `0`.
pub fn gcd_all<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a BigInt>,
{
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// Least nonnegative residue of `value` modulo `modulus > 0`.
pub(crate) fn residue(value: &BigInt, modulus: &BigInt) -> BigInt {
    use num_integer::Integer;
    value.mod_floor(modulus)
}

/// `2^k` as an arbitrary-precision integer.
pub fn pow2(k: u32) -> BigInt {
    BigInt::one() << (k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_accepts_both_forms() {
        let half = BigRational::parse_coefficient("3/2").unwrap();
        assert_eq!(half, BigRational::new(3.into(), 2.into()));
        assert_eq!(half.to_string(), "3/2");
        let five = BigRational::parse_coefficient("5").unwrap();
        assert_eq!(five.to_string(), "5");
        assert!(BigRational::parse_coefficient("1/0").is_err());
        assert!(BigInt::parse_coefficient("1/2").is_err());
    }

    #[test]
    fn gcd_of_zero_tuple_is_zero() {
        let zeros = [BigInt::zero(), BigInt::zero()];
        assert!(gcd_all(&zeros).is_zero());
        let v = [BigInt::from(-4), BigInt::from(6)];
        assert_eq!(gcd_all(&v), BigInt::from(2));
    }

    #[test]
    fn divisibility_by_zero() {
        assert!(divides(&BigInt::zero(), &BigInt::zero()));
        assert!(!divides(&BigInt::zero(), &BigInt::from(3)));
        assert!(divides(&BigInt::from(3), &BigInt::from(-6)));
    }
}
