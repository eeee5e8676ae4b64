//! Exact rational time arithmetic.
//!
//! Every instant and duration in this crate is a nonnegative rational kept in
//! lowest terms; there is no floating point anywhere on the time axis, so
//! simultaneous events and abutting intervals compare exactly.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// A nonnegative rational instant; also used for durations (spans).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint(Rat);

/// Alias used where a value is a duration rather than an instant.
pub type Span = TimePoint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TimeError {
    #[error("time value {0} is negative")]
    Negative(String),
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("scale factor {0} is not positive")]
    NonPositiveScale(String),
    #[error("malformed rational `{0}`")]
    Malformed(String),
}

impl TimePoint {
    pub fn new(value: Rat) -> Result<Self, TimeError> {
        if value.is_negative() {
            Err(TimeError::Negative(value.to_string()))
        } else {
            Ok(Self(value))
        }
    }

    pub fn zero() -> Self {
        Self(Rat::zero())
    }

    pub fn from_int(n: u64) -> Self {
        Self(Rat::from_integer(BigInt::from(n)))
    }

    /// Builds `num/den`. The sign may sit on either component; the stored
    /// value must come out nonnegative.
    pub fn ratio(num: i64, den: i64) -> Result<Self, TimeError> {
        if den == 0 {
            return Err(TimeError::ZeroDenominator);
        }
        Self::new(Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn as_rat(&self) -> &Rat {
        &self.0
    }

    pub fn into_rat(self) -> Rat {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Exact subtraction, defined only when the result stays nonnegative.
    pub fn checked_sub(&self, rhs: &TimePoint) -> Option<TimePoint> {
        if self.0 < rhs.0 {
            None
        } else {
            Some(TimePoint(&self.0 - &rhs.0))
        }
    }

    /// Scales by a strictly positive rational factor.
    pub fn scale(&self, factor: &Rat) -> Result<TimePoint, TimeError> {
        if !factor.is_positive() {
            return Err(TimeError::NonPositiveScale(factor.to_string()));
        }
        Ok(TimePoint(&self.0 * factor))
    }
}

impl Add<&TimePoint> for &TimePoint {
    type Output = TimePoint;

    fn add(self, rhs: &TimePoint) -> TimePoint {
        TimePoint(&self.0 + &rhs.0)
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rat(&self.0))
    }
}

impl fmt::Debug for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for TimePoint {
    type Err = TimeError;

    fn from_str(s: &str) -> Result<Self, TimeError> {
        Self::new(parse_rat(s)?)
    }
}

/// Parses `"n"` or `"n/d"` into an exact rational (any sign).
pub fn parse_rat(s: &str) -> Result<Rat, TimeError> {
    let bad = || TimeError::Malformed(s.to_string());
    let mut parts = s.splitn(2, '/');
    let num: BigInt = parts
        .next()
        .and_then(|p| p.trim().parse().ok())
        .ok_or_else(bad)?;
    let den: BigInt = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(TimeError::ZeroDenominator);
    }
    Ok(Rat::new(num, den))
}

/// Renders a rational as `n` (integral) or `n/d` in lowest terms.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Convenience constructor for exact rationals in code.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest double, for display and rendering only.
pub fn rat_to_f64(r: &Rat) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stores_lowest_terms() {
        let t = TimePoint::ratio(6, 4).unwrap();
        assert_eq!(t.as_rat().numer(), &BigInt::from(3));
        assert_eq!(t.as_rat().denom(), &BigInt::from(2));
    }

    #[test]
    fn rejects_negative_values() {
        assert!(TimePoint::ratio(-1, 2).is_err());
        assert!(TimePoint::ratio(1, -2).is_err());
        // sign cancels
        assert!(TimePoint::ratio(-1, -2).is_ok());
    }

    #[test]
    fn checked_sub_requires_nonnegative_result() {
        let a = TimePoint::ratio(1, 2).unwrap();
        let b = TimePoint::ratio(1, 3).unwrap();
        assert_eq!(a.checked_sub(&b), Some(TimePoint::ratio(1, 6).unwrap()));
        assert_eq!(b.checked_sub(&a), None);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "7", "3/100", "22/7"] {
            let t: TimePoint = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert_eq!("6/4".parse::<TimePoint>().unwrap().to_string(), "3/2");
    }

    #[test]
    fn scale_needs_positive_factor() {
        let t = TimePoint::from_int(2);
        assert_eq!(
            t.scale(&rat(3, 7)).unwrap(),
            TimePoint::ratio(6, 7).unwrap()
        );
        assert!(t.scale(&rat(0, 1)).is_err());
        assert!(t.scale(&rat(-1, 1)).is_err());
    }
}
