//! Seeded random instance generation.
//!
//! Times are drawn on a rational grid with denominator 1000, announcements
//! give exactly the required notice (`r - a = t * p`), and the output is a
//! deterministic function of the parameters and seed.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;
use crate::job::{Job, JobId};
use crate::time::{Rat, TimePoint};
use crate::weight::WeightModel;

/// Grid denominator for generated times.
const GRID: i64 = 1000;

#[derive(Clone, Debug)]
pub struct GeneratorParams {
    pub count: usize,
    pub notice: Rat,
    pub horizon: TimePoint,
    pub processing_min: Rat,
    pub processing_max: Rat,
    pub slack_min: Rat,
    pub slack_max: Rat,
    pub weights: WeightModel,
}

impl GeneratorParams {
    /// Defaults used by the sweep harness: tight-ish windows over a short
    /// horizon so conflicts are common.
    pub fn standard(count: usize, notice: Rat, weights: WeightModel) -> Self {
        Self {
            count,
            notice,
            horizon: TimePoint::from_int(20),
            processing_min: Rat::new(BigInt::from(1), BigInt::from(10)),
            processing_max: Rat::from_integer(BigInt::from(3)),
            slack_min: Rat::from_integer(BigInt::from(0)),
            slack_max: Rat::from_integer(BigInt::from(2)),
            weights,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratorError {
    #[error("empty grid range for {what}")]
    EmptyRange { what: &'static str },
    #[error("negative bound for {what}")]
    NegativeBound { what: &'static str },
    #[error("range endpoint too large for the grid")]
    Overflow,
}

fn grid_bounds(lo: &Rat, hi: &Rat, what: &'static str) -> Result<(i64, i64), GeneratorError> {
    let lo_grid = (lo * Rat::from_integer(BigInt::from(GRID))).ceil();
    let hi_grid = (hi * Rat::from_integer(BigInt::from(GRID))).floor();
    let lo_int = lo_grid.to_integer().to_i64().ok_or(GeneratorError::Overflow)?;
    let hi_int = hi_grid.to_integer().to_i64().ok_or(GeneratorError::Overflow)?;
    if lo_int > hi_int {
        return Err(GeneratorError::EmptyRange { what });
    }
    Ok((lo_int, hi_int))
}

fn grid_value(k: i64) -> Rat {
    Rat::new(BigInt::from(k), BigInt::from(GRID))
}

/// Draws `count` jobs with exact notice `r - a = t * p`, processing times
/// and slacks uniform on the grid within their ranges, and releases uniform
/// in `[t * p, horizon]`. Jobs come out sorted by announcement with ids in
/// that order; the result always validates.
pub fn random_instance(params: &GeneratorParams, seed: u64) -> Result<Instance, GeneratorError> {
    if params.notice.is_negative() {
        return Err(GeneratorError::NegativeBound { what: "notice" });
    }
    if params.slack_min.is_negative() {
        return Err(GeneratorError::NegativeBound { what: "slack" });
    }
    if !params.processing_min.is_positive() {
        return Err(GeneratorError::NegativeBound { what: "processing" });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p_lo, p_hi) = grid_bounds(&params.processing_min, &params.processing_max, "processing")?;
    let (s_lo, s_hi) = grid_bounds(&params.slack_min, &params.slack_max, "slack")?;

    let mut drawn: Vec<(TimePoint, usize, Job)> = Vec::with_capacity(params.count);
    for index in 0..params.count {
        let p = grid_value(rng.gen_range(p_lo..=p_hi));
        let lead = &params.notice * &p;
        let (r_lo, r_hi) = grid_bounds(&lead, params.horizon.as_rat(), "release")?;
        let r = grid_value(rng.gen_range(r_lo..=r_hi));
        let slack = grid_value(rng.gen_range(s_lo..=s_hi));

        let announce = TimePoint::new(&r - &lead).expect("r >= t*p by construction");
        let release = TimePoint::new(r).expect("grid lower bound is nonnegative");
        let processing = TimePoint::new(p.clone()).expect("positive");
        let deadline = TimePoint::new(release.as_rat() + &p + &slack).expect("nonnegative");
        drawn.push((
            announce.clone(),
            index,
            Job::new(JobId(0), announce, release, processing, deadline),
        ));
    }

    drawn.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let jobs: Vec<Job> = drawn
        .into_iter()
        .enumerate()
        .map(|(i, (_, _, mut job))| {
            job.id = JobId(i as u32);
            job
        })
        .collect();

    Ok(Instance::new(
        jobs,
        params.notice.clone(),
        params.weights.clone(),
    ))
}
