//! Exact rational arithmetic for interval endpoints and revealed values.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact rational number used for every endpoint, value, and ratio in the
/// library. Solver decisions never touch floating point, so comparisons and
/// serialized output stay bit-exact across platforms and runs.
///
/// Backed by `Ratio<i64>`, which comfortably covers the magnitudes produced
/// by the instance generators and the competitive-ratio bookkeeping.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(Ratio<i64>);

impl Scalar {
    /// Builds `numer / denom`. Panics on a zero denominator, which is a
    /// programming error rather than an input error (untrusted text goes
    /// through `FromStr`).
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "scalar denominator must be non-zero");
        Scalar(Ratio::new(numer, denom))
    }

    pub fn int(value: i64) -> Self {
        Scalar(Ratio::from_integer(value))
    }

    pub fn zero() -> Self {
        Scalar(Ratio::zero())
    }

    pub fn one() -> Self {
        Scalar(Ratio::from_integer(1))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
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

    /// Exact midpoint of two scalars.
    pub fn midpoint(a: Self, b: Self) -> Self {
        (a + b) / Scalar::int(2)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// True when the reduced denominator is of the form `2^a * 5^b`, i.e. the
    /// value has a finite decimal expansion.
    pub fn has_finite_decimal(&self) -> bool {
        let mut d = self.denom();
        for p in [2, 5] {
            while d % p == 0 {
                d /= p;
            }
        }
        d == 1
    }

    /// Renders the value as a finite decimal when possible and as `p/q`
    /// otherwise. Used for human-facing CSV output; `Display` keeps the
    /// canonical fraction form used by the instance format.
    pub fn to_decimal_string(&self) -> String {
        if !self.has_finite_decimal() {
            return format!("{self}");
        }
        let mut scale = 0u32;
        let mut d = self.denom();
        while d % 2 == 0 {
            d /= 2;
            scale += 1;
        }
        let mut fives = 0u32;
        while d % 5 == 0 {
            d /= 5;
            fives += 1;
        }
        scale = scale.max(fives);
        if scale == 0 {
            return format!("{}", self.numer());
        }
        let pow = 10i64.pow(scale);
        let scaled = self.numer() * (pow / self.denom());
        let sign = if scaled < 0 { "-" } else { "" };
        let mag = scaled.unsigned_abs();
        let int_part = mag / pow as u64;
        let frac_part = mag % pow as u64;
        format!("{sign}{int_part}.{frac_part:0width$}", width = scale as usize)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<i64> for Scalar {
    fn from(value: i64) -> Self {
        Scalar::int(value)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseScalarError {
    #[error("empty scalar literal")]
    Empty,
    #[error("invalid scalar literal `{0}`")]
    Invalid(String),
    #[error("scalar literal `{0}` overflows the supported range")]
    Overflow(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts integers (`-3`), fractions (`11/4`), and finite decimals
    /// (`2.75`). Fractions are the canonical output form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        let invalid = || ParseScalarError::Invalid(s.to_string());
        let overflow = || ParseScalarError::Overflow(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let n: i64 = num.trim().parse().map_err(|_| invalid())?;
            let d: i64 = den.trim().parse().map_err(|_| invalid())?;
            if d == 0 {
                return Err(ParseScalarError::ZeroDenominator(s.to_string()));
            }
            return Ok(Scalar(Ratio::new(n, d)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(invalid());
            }
            let negative = int_part.starts_with('-');
            let int_mag: i64 = match int_part {
                "" | "-" => 0,
                other => other.parse().map_err(|_| invalid())?,
            };
            let scale = 10i64
                .checked_pow(frac_part.len() as u32)
                .ok_or_else(overflow)?;
            let frac: i64 = frac_part.parse().map_err(|_| invalid())?;
            let mag = int_mag
                .checked_abs()
                .and_then(|m| m.checked_mul(scale))
                .and_then(|m| m.checked_add(frac))
                .ok_or_else(overflow)?;
            let numer = if negative { -mag } else { mag };
            return Ok(Scalar(Ratio::new(numer, scale)));
        }
        let n: i64 = s.parse().map_err(|_| invalid())?;
        Ok(Scalar::int(n))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 / rhs.0)
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
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!("3".parse::<Scalar>().unwrap(), Scalar::int(3));
        assert_eq!("-7".parse::<Scalar>().unwrap(), Scalar::int(-7));
        assert_eq!("11/4".parse::<Scalar>().unwrap(), Scalar::new(11, 4));
        assert_eq!("-3/6".parse::<Scalar>().unwrap(), Scalar::new(-1, 2));
        assert_eq!("2.75".parse::<Scalar>().unwrap(), Scalar::new(11, 4));
        assert_eq!("-0.5".parse::<Scalar>().unwrap(), Scalar::new(-1, 2));
        assert_eq!(".5".parse::<Scalar>().unwrap(), Scalar::new(1, 2));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!("".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("1.".parse::<Scalar>().is_err());
        assert!("1.2.3".parse::<Scalar>().is_err());
    }

    #[test]
    fn display_is_canonical_and_round_trips() {
        for text in ["0", "5", "-5", "1/2", "-11/4", "7/3"] {
            let v: Scalar = text.parse().unwrap();
            assert_eq!(format!("{v}"), text);
        }
        // Decimal input reduces to fraction output.
        let v: Scalar = "2.5".parse().unwrap();
        assert_eq!(format!("{v}"), "5/2");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Scalar::new(1, 2).to_decimal_string(), "0.5");
        assert_eq!(Scalar::new(-11, 4).to_decimal_string(), "-2.75");
        assert_eq!(Scalar::int(3).to_decimal_string(), "3");
        assert_eq!(Scalar::new(1, 3).to_decimal_string(), "1/3");
        assert_eq!(Scalar::new(1, 8).to_decimal_string(), "0.125");
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = Scalar::new(1, 3);
        let b = Scalar::new(1, 6);
        assert_eq!(a + b, Scalar::new(1, 2));
        assert_eq!(a - b, Scalar::new(1, 6));
        assert_eq!(a * b, Scalar::new(1, 18));
        assert_eq!(a / b, Scalar::int(2));
        assert_eq!(Scalar::midpoint(Scalar::int(1), Scalar::int(2)), Scalar::new(3, 2));
    }
}
