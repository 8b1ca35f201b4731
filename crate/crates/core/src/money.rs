//! Exact rational money amounts.
//!
//! Every value, cost, payoff, and incentive in the crate is a [`Money`]. The
//! wrapper keeps arithmetic exact (no rounding anywhere) and owns the textual
//! format used by scenario files and reports: integers (`12`), fractions
//! (`13/3`), and finite decimals (`0.5`, converted exactly to `1/2`).

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational amount in currency-neutral units.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Money(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational number {input:?}: {reason}")]
pub struct ParseMoneyError {
    pub input: String,
    pub reason: &'static str,
}

impl Money {
    pub fn zero() -> Self {
        Money(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        Money(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom` in lowest terms. Panics if `denom` is zero.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Money(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Money(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
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

    pub fn abs(&self) -> Self {
        Money(self.0.abs())
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Multiplies by an integer count.
    pub fn times(&self, k: usize) -> Self {
        Money(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }

    /// Divides by a positive integer count. Panics on zero.
    pub fn div_count(&self, k: usize) -> Self {
        assert!(k > 0, "division by zero count");
        Money(&self.0 / BigRational::from_integer(BigInt::from(k)))
    }
}

impl fmt::Display for Money {
    // Ratio's Display already prints lowest terms and omits a unit denominator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Money({})", self.0)
    }
}

impl From<i64> for Money {
    fn from(n: i64) -> Self {
        Money::from_integer(n)
    }
}

impl From<BigRational> for Money {
    fn from(r: BigRational) -> Self {
        Money(r)
    }
}

impl FromStr for Money {
    type Err = ParseMoneyError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseMoneyError {
            input: input.to_string(),
            reason,
        };
        let s = input.trim();
        if s.is_empty() {
            return Err(err("empty string"));
        }
        if let Some((num, den)) = s.split_once('/') {
            let num = parse_integer(num.trim()).ok_or_else(|| err("bad numerator"))?;
            let den = parse_integer(den.trim()).ok_or_else(|| err("bad denominator"))?;
            if den.is_zero() {
                return Err(err("zero denominator"));
            }
            return Ok(Money(BigRational::new(num, den)));
        }
        if let Some((whole, frac)) = s.split_once('.') {
            let negative = whole.starts_with('-');
            let whole_digits = whole.trim_start_matches(['-', '+']);
            if whole.len() - whole_digits.len() > 1 {
                return Err(err("repeated sign"));
            }
            if (whole_digits.is_empty() && frac.is_empty())
                || !whole_digits.bytes().all(|b| b.is_ascii_digit())
                || !frac.bytes().all(|b| b.is_ascii_digit())
            {
                return Err(err("bad decimal"));
            }
            let digits = format!("{whole_digits}{frac}");
            let numer: BigInt = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits.parse().map_err(|_| err("bad decimal"))?
            };
            let denom = num_traits::pow(BigInt::from(10), frac.len());
            let value = BigRational::new(numer, denom);
            return Ok(Money(if negative { -value } else { value }));
        }
        parse_integer(s)
            .map(|n| Money(BigRational::from_integer(n)))
            .ok_or_else(|| err("not an integer, fraction, or decimal"))
    }
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct MoneyVisitor;

        impl Visitor<'_> for MoneyVisitor {
            type Value = Money;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str(
                    "an integer, or a string holding an integer, \"a/b\" fraction, or decimal",
                )
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Money, E> {
                Ok(Money::from_integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Money, E> {
                Ok(Money(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Money, E> {
                Err(E::custom(format!(
                    "non-integer JSON number {v} is not exact; write it as a string, e.g. \"{v}\""
                )))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Money, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(MoneyVisitor)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Money> for Money {
            type Output = Money;
            fn $method(self, rhs: Money) -> Money {
                Money(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Money> for Money {
            type Output = Money;
            fn $method(self, rhs: &Money) -> Money {
                Money(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Money> for &Money {
            type Output = Money;
            fn $method(self, rhs: Money) -> Money {
                Money((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Money> for &Money {
            type Output = Money;
            fn $method(self, rhs: &Money) -> Money {
                Money((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Money> for Money {
    fn add_assign(&mut self, rhs: &Money) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Money> for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Money> for Money {
    fn sub_assign(&mut self, rhs: &Money) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign<Money> for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Neg for &Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-&self.0)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        iter.fold(Money::zero(), |acc, x| acc + x)
    }
}

impl Zero for Money {
    fn zero() -> Self {
        Money::zero()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Money {
    fn one() -> Self {
        Money(BigRational::one())
    }
}
