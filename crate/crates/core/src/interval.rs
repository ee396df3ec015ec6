//! Uncertainty intervals: open ranges guaranteed to contain a hidden value,
//! or already-known exact values.

use crate::scalar::Scalar;
use std::fmt;

/// The uncertainty area of one element. An `Open` interval `(lower, upper)`
/// strictly contains the unknown true value and can be queried to collapse it
/// to that value; a `Trivial` interval is a known point and is never queried.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum UncertaintyInterval {
    Trivial(Scalar),
    Open { lower: Scalar, upper: Scalar },
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum IntervalError {
    #[error("open interval requires lower < upper, got ({lower}, {upper})")]
    EmptyOpen { lower: Scalar, upper: Scalar },
    #[error("value {value} lies outside the open interval ({lower}, {upper})")]
    ValueOutside {
        value: Scalar,
        lower: Scalar,
        upper: Scalar,
    },
    #[error("value {value} does not match the trivial interval value {expected}")]
    TrivialMismatch { value: Scalar, expected: Scalar },
}

impl UncertaintyInterval {
    pub fn trivial(value: Scalar) -> Self {
        UncertaintyInterval::Trivial(value)
    }

    pub fn open(lower: Scalar, upper: Scalar) -> Result<Self, IntervalError> {
        if lower < upper {
            Ok(UncertaintyInterval::Open { lower, upper })
        } else {
            Err(IntervalError::EmptyOpen { lower, upper })
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, UncertaintyInterval::Trivial(_))
    }

    pub fn is_open(&self) -> bool {
        !self.is_trivial()
    }

    /// Lower limit: the left endpoint for open intervals, the value itself
    /// for trivial ones.
    pub fn lower(&self) -> Scalar {
        match *self {
            UncertaintyInterval::Trivial(v) => v,
            UncertaintyInterval::Open { lower, .. } => lower,
        }
    }

    /// Upper limit, symmetric to [`lower`](Self::lower).
    pub fn upper(&self) -> Scalar {
        match *self {
            UncertaintyInterval::Trivial(v) => v,
            UncertaintyInterval::Open { upper, .. } => upper,
        }
    }

    /// Strict interior membership. Trivial intervals have an empty interior,
    /// so they never contain anything; this matches how membership tests are
    /// used throughout (a value inside an interval forces a query of it).
    pub fn strictly_contains(&self, value: Scalar) -> bool {
        match *self {
            UncertaintyInterval::Trivial(_) => false,
            UncertaintyInterval::Open { lower, upper } => lower < value && value < upper,
        }
    }

    /// Whether `other` lies entirely inside `self`: a nested open interval
    /// (sharing endpoints is allowed) or a trivial value in the interior.
    /// Trivial intervals enclose nothing.
    pub fn encloses(&self, other: &UncertaintyInterval) -> bool {
        match (*self, *other) {
            (UncertaintyInterval::Trivial(_), _) => false,
            (UncertaintyInterval::Open { .. }, UncertaintyInterval::Trivial(v)) => {
                self.strictly_contains(v)
            }
            (
                UncertaintyInterval::Open { lower: sl, upper: su },
                UncertaintyInterval::Open { lower: ol, upper: ou },
            ) => sl <= ol && ou <= su,
        }
    }

    /// Non-empty intersection. Open intervals intersect when their interiors
    /// overlap; an open and a trivial interval intersect when the value lies
    /// strictly inside; two trivial intervals intersect only when equal.
    pub fn intersects(&self, other: &UncertaintyInterval) -> bool {
        match (*self, *other) {
            (UncertaintyInterval::Trivial(a), UncertaintyInterval::Trivial(b)) => a == b,
            (UncertaintyInterval::Trivial(v), UncertaintyInterval::Open { .. }) => {
                other.strictly_contains(v)
            }
            (UncertaintyInterval::Open { .. }, UncertaintyInterval::Trivial(v)) => {
                self.strictly_contains(v)
            }
            (
                UncertaintyInterval::Open { lower: sl, upper: su },
                UncertaintyInterval::Open { lower: ol, upper: ou },
            ) => sl < ou && ol < su,
        }
    }

    /// Checks that `value` is a legal hidden value for this interval:
    /// strictly inside an open interval, or equal to a trivial one.
    pub fn admits(&self, value: Scalar) -> Result<(), IntervalError> {
        match *self {
            UncertaintyInterval::Trivial(expected) => {
                if value == expected {
                    Ok(())
                } else {
                    Err(IntervalError::TrivialMismatch { value, expected })
                }
            }
            UncertaintyInterval::Open { lower, upper } => {
                if self.strictly_contains(value) {
                    Ok(())
                } else {
                    Err(IntervalError::ValueOutside { value, lower, upper })
                }
            }
        }
    }
}

impl fmt::Debug for UncertaintyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UncertaintyInterval::Trivial(v) => write!(f, "{{{v}}}"),
            UncertaintyInterval::Open { lower, upper } => write!(f, "({lower}, {upper})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(l: i64, u: i64) -> UncertaintyInterval {
        UncertaintyInterval::open(Scalar::int(l), Scalar::int(u)).unwrap()
    }

    #[test]
    fn open_requires_nonempty_interior() {
        assert!(UncertaintyInterval::open(Scalar::int(1), Scalar::int(1)).is_err());
        assert!(UncertaintyInterval::open(Scalar::int(2), Scalar::int(1)).is_err());
    }

    #[test]
    fn membership_is_strict() {
        let i = open(0, 4);
        assert!(i.strictly_contains(Scalar::new(1, 2)));
        assert!(!i.strictly_contains(Scalar::int(0)));
        assert!(!i.strictly_contains(Scalar::int(4)));
        let t = UncertaintyInterval::trivial(Scalar::int(2));
        assert!(!t.strictly_contains(Scalar::int(2)));
    }

    #[test]
    fn enclosure_allows_shared_endpoints() {
        assert!(open(0, 4).encloses(&open(0, 2)));
        assert!(open(0, 4).encloses(&open(2, 4)));
        assert!(open(0, 4).encloses(&UncertaintyInterval::trivial(Scalar::int(2))));
        assert!(!open(0, 4).encloses(&open(0, 5)));
        // Trivial endpoints are not interior points.
        assert!(!open(0, 4).encloses(&UncertaintyInterval::trivial(Scalar::int(4))));
        assert!(!UncertaintyInterval::trivial(Scalar::int(1)).encloses(&open(0, 4)));
    }

    #[test]
    fn intersection_ignores_touching_endpoints() {
        assert!(open(0, 2).intersects(&open(1, 3)));
        assert!(!open(0, 2).intersects(&open(2, 4)));
        assert!(open(0, 2).intersects(&UncertaintyInterval::trivial(Scalar::int(1))));
        assert!(!open(0, 2).intersects(&UncertaintyInterval::trivial(Scalar::int(2))));
        let a = UncertaintyInterval::trivial(Scalar::int(1));
        let b = UncertaintyInterval::trivial(Scalar::int(1));
        assert!(a.intersects(&b));
    }

    #[test]
    fn admits_checks_value_legality() {
        assert!(open(0, 2).admits(Scalar::int(1)).is_ok());
        assert!(open(0, 2).admits(Scalar::int(0)).is_err());
        let t = UncertaintyInterval::trivial(Scalar::int(2));
        assert!(t.admits(Scalar::int(2)).is_ok());
        assert!(t.admits(Scalar::int(1)).is_err());
    }
}
