//! Weight models and the benevolence diagnostic.
//!
//! Proportional and unweighted values are exact rationals; the power model
//! `w(p) = p^k` is evaluated in floating point. The two kinds never mix
//! inside one instance, and arithmetic across kinds is a programming error
//! surfaced by a panic.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::time::{format_rat, Rat, Span};

#[derive(Clone, PartialEq, Debug)]
pub enum WeightModel {
    /// `w(p) = p`, exact.
    Proportional,
    /// `w(p) = 1`, exact.
    Unweighted,
    /// `w(p) = p^exponent` with `exponent >= 1`, floating point.
    PowerBenevolent { exponent: f64 },
}

impl WeightModel {
    pub fn is_exact(&self) -> bool {
        !matches!(self, WeightModel::PowerBenevolent { .. })
    }
}

impl fmt::Display for WeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightModel::Proportional => write!(f, "proportional"),
            WeightModel::Unweighted => write!(f, "unweighted"),
            WeightModel::PowerBenevolent { exponent } => write!(f, "power(k={exponent})"),
        }
    }
}

/// A schedule value: exact rational for the exact models, `f64` for the
/// power model.
#[derive(Clone, PartialEq, Debug)]
pub enum Weight {
    Exact(Rat),
    Approx(f64),
}

impl Weight {
    pub fn zero_for(model: &WeightModel) -> Weight {
        if model.is_exact() {
            Weight::Exact(Rat::zero())
        } else {
            Weight::Approx(0.0)
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Weight::Exact(r) => r.is_zero(),
            Weight::Approx(x) => *x == 0.0,
        }
    }

    pub fn zero_like(&self) -> Weight {
        match self {
            Weight::Exact(_) => Weight::Exact(Rat::zero()),
            Weight::Approx(_) => Weight::Approx(0.0),
        }
    }

    pub fn add(&self, rhs: &Weight) -> Weight {
        match (self, rhs) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a + b),
            (Weight::Approx(a), Weight::Approx(b)) => Weight::Approx(a + b),
            _ => panic!("weight kinds mixed across models"),
        }
    }

    pub fn sub(&self, rhs: &Weight) -> Weight {
        match (self, rhs) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a - b),
            (Weight::Approx(a), Weight::Approx(b)) => Weight::Approx(a - b),
            _ => panic!("weight kinds mixed across models"),
        }
    }

    /// `self / rhs`; caller guarantees `rhs` is nonzero.
    pub fn div(&self, rhs: &Weight) -> Weight {
        match (self, rhs) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a / b),
            (Weight::Approx(a), Weight::Approx(b)) => Weight::Approx(a / b),
            _ => panic!("weight kinds mixed across models"),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Weight::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Weight::Exact(r) => Some(r),
            Weight::Approx(_) => None,
        }
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Weight) -> Option<Ordering> {
        match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => Some(a.cmp(b)),
            (Weight::Approx(a), Weight::Approx(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Exact(r) => write!(f, "{}", format_rat(r)),
            Weight::Approx(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeightError {
    #[error("processing time {0} is not positive")]
    NonPositiveProcessing(String),
}

/// Evaluates the model at a strictly positive processing time.
pub fn weight_of(model: &WeightModel, p: &Span) -> Result<Weight, WeightError> {
    if !p.as_rat().is_positive() {
        return Err(WeightError::NonPositiveProcessing(p.to_string()));
    }
    Ok(eval_model(model, p.as_rat()))
}

/// Model evaluation without the positivity guard; used by the benevolence
/// checker which needs `f(0)`.
fn eval_model(model: &WeightModel, p: &Rat) -> Weight {
    match model {
        WeightModel::Proportional => Weight::Exact(p.clone()),
        WeightModel::Unweighted => Weight::Exact(Rat::from_integer(1.into())),
        WeightModel::PowerBenevolent { exponent } => {
            let x = p.to_f64().unwrap_or(f64::NAN);
            Weight::Approx(x.powf(*exponent))
        }
    }
}

/// A sample for the exchange condition: `0 < eps <= p1 <= p2`.
#[derive(Clone, Debug)]
pub struct CurveTriple {
    pub p1: Rat,
    pub p2: Rat,
    pub eps: Rat,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveCheckError {
    #[error("sample grid is empty")]
    EmptyGrid,
    #[error("triple {index} violates 0 < eps <= p1 <= p2")]
    MalformedTriple { index: usize },
}

/// One empirically violated benevolence condition.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveViolation {
    /// `f(0) != 0`.
    NonzeroAtOrigin { value: Weight },
    /// `f(p) <= 0` for a positive sample point.
    NonPositiveValue { p: Rat, value: Weight },
    /// `f(p1) + f(p2) > f(p1 - eps) + f(p2 + eps)`.
    ExchangeFails {
        p1: Rat,
        p2: Rat,
        eps: Rat,
        lhs: Weight,
        rhs: Weight,
    },
    /// Not strictly increasing between two sample points.
    NotIncreasing { lo: Rat, hi: Rat },
}

impl fmt::Display for CurveViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveViolation::NonzeroAtOrigin { value } => write!(f, "f(0) = {value} != 0"),
            CurveViolation::NonPositiveValue { p, value } => {
                write!(f, "f({}) = {value} <= 0", format_rat(p))
            }
            CurveViolation::ExchangeFails {
                p1,
                p2,
                eps,
                lhs,
                rhs,
            } => write!(
                f,
                "f({})+f({}) = {lhs} > {rhs} = f({}-{eps})+f({}+{eps}) for eps={}",
                format_rat(p1),
                format_rat(p2),
                format_rat(p1),
                format_rat(p2),
                format_rat(eps),
                eps = format_rat(eps),
            ),
            CurveViolation::NotIncreasing { lo, hi } => write!(
                f,
                "f not strictly increasing between {} and {}",
                format_rat(lo),
                format_rat(hi)
            ),
        }
    }
}

/// Cross-kind comparison slack: exact models compare exactly, the float
/// model tolerates relative rounding noise in the exchange test.
const FLOAT_SLACK: f64 = 1e-9;

/// Empirically checks benevolence on a sample grid:
/// value vanishes only at zero, exchange moves mass upward, and the curve
/// is strictly increasing on the sampled points. A clean pass is evidence,
/// not a proof.
pub fn check_c_benevolent(
    model: &WeightModel,
    grid: &[CurveTriple],
) -> Result<Vec<CurveViolation>, CurveCheckError> {
    if grid.is_empty() {
        return Err(CurveCheckError::EmptyGrid);
    }
    for (index, t) in grid.iter().enumerate() {
        if !t.eps.is_positive() || t.eps > t.p1 || t.p1 > t.p2 {
            return Err(CurveCheckError::MalformedTriple { index });
        }
    }

    let mut violations = Vec::new();

    let at_zero = eval_model(model, &Rat::zero());
    if !at_zero.is_zero() {
        violations.push(CurveViolation::NonzeroAtOrigin { value: at_zero });
    }

    // Sample points visited by the grid, deduplicated and sorted.
    let mut points: Vec<Rat> = Vec::new();
    for t in grid {
        for p in [&t.p1, &t.p2, &(&t.p2 + &t.eps)] {
            points.push(p.clone());
        }
        let left = &t.p1 - &t.eps;
        if left.is_positive() {
            points.push(left);
        }
    }
    points.sort();
    points.dedup();

    for p in &points {
        let v = eval_model(model, p);
        let positive = match &v {
            Weight::Exact(r) => r.is_positive(),
            Weight::Approx(x) => *x > 0.0,
        };
        if !positive {
            violations.push(CurveViolation::NonPositiveValue {
                p: p.clone(),
                value: v,
            });
        }
    }

    for t in grid {
        let lhs = eval_model(model, &t.p1).add(&eval_model(model, &t.p2));
        let rhs = eval_model(model, &(&t.p1 - &t.eps)).add(&eval_model(model, &(&t.p2 + &t.eps)));
        let fails = match (&lhs, &rhs) {
            (Weight::Exact(a), Weight::Exact(b)) => a > b,
            (Weight::Approx(a), Weight::Approx(b)) => *a > b + FLOAT_SLACK * b.abs().max(1.0),
            _ => unreachable!("single model"),
        };
        if fails {
            violations.push(CurveViolation::ExchangeFails {
                p1: t.p1.clone(),
                p2: t.p2.clone(),
                eps: t.eps.clone(),
                lhs,
                rhs,
            });
        }
    }

    for pair in points.windows(2) {
        let lo = eval_model(model, &pair[0]);
        let hi = eval_model(model, &pair[1]);
        let increasing = match (&lo, &hi) {
            (Weight::Exact(a), Weight::Exact(b)) => b > a,
            (Weight::Approx(a), Weight::Approx(b)) => b > a,
            _ => unreachable!("single model"),
        };
        if !increasing {
            violations.push(CurveViolation::NotIncreasing {
                lo: pair[0].clone(),
                hi: pair[1].clone(),
            });
        }
    }

    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{rat, TimePoint};

    fn triple(p1: (i64, i64), p2: (i64, i64), eps: (i64, i64)) -> CurveTriple {
        CurveTriple {
            p1: rat(p1.0, p1.1),
            p2: rat(p2.0, p2.1),
            eps: rat(eps.0, eps.1),
        }
    }

    #[test]
    fn proportional_weight_is_identity() {
        let p = TimePoint::ratio(5, 2).unwrap();
        assert_eq!(
            weight_of(&WeightModel::Proportional, &p).unwrap(),
            Weight::Exact(rat(5, 2))
        );
    }

    #[test]
    fn unweighted_weight_is_one() {
        let p = TimePoint::from_int(7);
        assert_eq!(
            weight_of(&WeightModel::Unweighted, &p).unwrap(),
            Weight::Exact(rat(1, 1))
        );
    }

    #[test]
    fn power_of_one_is_one() {
        for k in [1.0, 2.0, 7.8348] {
            let w = weight_of(
                &WeightModel::PowerBenevolent { exponent: k },
                &TimePoint::from_int(1),
            )
            .unwrap();
            assert_eq!(w, Weight::Approx(1.0));
        }
    }

    #[test]
    fn power_hits_designed_value() {
        // exponent chosen so that f(9/5) = 100
        let k = 100f64.ln() / 1.8f64.ln();
        let w = weight_of(
            &WeightModel::PowerBenevolent { exponent: k },
            &TimePoint::ratio(9, 5).unwrap(),
        )
        .unwrap();
        assert!((w.to_f64() - 100.0).abs() <= 1e-6, "got {w}");
    }

    #[test]
    fn zero_processing_is_rejected() {
        let err = weight_of(&WeightModel::Proportional, &TimePoint::zero());
        assert!(err.is_err());
    }

    #[test]
    fn proportional_passes_benevolence() {
        let grid = vec![triple((1, 1), (2, 1), (1, 2)), triple((1, 2), (1, 2), (1, 2))];
        let v = check_c_benevolent(&WeightModel::Proportional, &grid).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn unweighted_fails_origin_and_monotonicity() {
        let grid = vec![triple((1, 1), (2, 1), (1, 1))];
        let v = check_c_benevolent(&WeightModel::Unweighted, &grid).unwrap();
        assert!(v
            .iter()
            .any(|x| matches!(x, CurveViolation::NonzeroAtOrigin { .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, CurveViolation::NotIncreasing { .. })));
    }

    #[test]
    fn square_passes_on_the_sample_grid() {
        // (p1-e)^2 + (p2+e)^2 - p1^2 - p2^2 = 2e(p2-p1) + 2e^2 >= 0,
        // so the exchange condition holds for f(p)=p^2 on any valid triple.
        let grid = vec![triple((1, 1), (1, 1), (1, 2)), triple((1, 1), (2, 1), (1, 1))];
        let v = check_c_benevolent(&WeightModel::PowerBenevolent { exponent: 2.0 }, &grid).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn malformed_triples_are_errors() {
        let grid = vec![triple((2, 1), (1, 1), (1, 2))];
        assert_eq!(
            check_c_benevolent(&WeightModel::Proportional, &grid),
            Err(CurveCheckError::MalformedTriple { index: 0 })
        );
        assert_eq!(
            check_c_benevolent(&WeightModel::Proportional, &[]),
            Err(CurveCheckError::EmptyGrid)
        );
    }
}
