//! Adaptive adversaries that force poor online performance.
//!
//! Each adversary is a job source that watches only the algorithm's start
//! commitments. Every emitted job honors the adversary's own declared
//! notice level exactly: an emission that breaks it aborts the run as an
//! adversary bug, since the whole point is to beat algorithms that were
//! promised that notice.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::instance::Instance;
use crate::job::{Job, JobId};
use crate::schedule::{schedule_value, Schedule, ScheduleError};
use crate::sim::{
    drive, JobSource, OnlineAlgorithm, SimulationError, SimulationTrace, SourceStep, Stimulus,
};
use crate::solver::{optimal_offline, SolverStats};
use crate::time::{Rat, TimePoint};
use crate::weight::{Weight, WeightModel};

/// An adaptive job source with a declared notice level and weight model.
pub trait Adversary {
    fn declared_notice(&self) -> &Rat;
    fn weight_model(&self) -> &WeightModel;
    /// The ratio the construction is designed to force, for reporting.
    fn designed_ratio(&self) -> Weight;
    fn next(&mut self, stimulus: Stimulus<'_>) -> SourceStep;
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum AdversaryError {
    #[error("adversary bug: job {job} {violation}")]
    Bug { job: JobId, violation: String },
    #[error("adversary parameters rejected: {0}")]
    Guard(String),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Result of one adversarial run: the full emitted instance, both values,
/// and their ratio (1 by convention when nothing was emitted).
pub struct AdversaryOutcome {
    pub instance: Instance,
    pub alg_value: Weight,
    pub opt_value: Weight,
    pub ratio: Weight,
    /// The algorithm earned nothing against a positive optimum.
    pub unbounded: bool,
    pub designed_ratio: Weight,
    pub alg_schedule: Schedule,
    pub opt_schedule: Schedule,
    pub trace: SimulationTrace,
    pub solver_stats: SolverStats,
}

fn emission_violation(job: &Job, notice: &Rat) -> Option<String> {
    if !job.processing.as_rat().is_positive() {
        return Some("has nonpositive processing time".into());
    }
    if job.announce > job.release {
        return Some("is announced after its release".into());
    }
    let end = job.release.as_rat() + job.processing.as_rat();
    if &end > job.deadline.as_rat() {
        return Some("cannot fit its own window".into());
    }
    let lead = job.release.as_rat() - job.announce.as_rat();
    if lead < notice * job.processing.as_rat() {
        return Some(format!(
            "violates the declared notice level (lead {lead}, needs {})",
            notice * job.processing.as_rat()
        ));
    }
    None
}

struct CheckedSource<'a> {
    inner: &'a mut dyn Adversary,
    notice: Rat,
    error: Option<AdversaryError>,
}

impl JobSource for CheckedSource<'_> {
    fn next(&mut self, stimulus: Stimulus<'_>) -> SourceStep {
        if self.error.is_some() {
            return SourceStep::Done;
        }
        match self.inner.next(stimulus) {
            SourceStep::Emit(jobs) => {
                for job in &jobs {
                    if let Some(violation) = emission_violation(job, &self.notice) {
                        self.error = Some(AdversaryError::Bug {
                            job: job.id,
                            violation,
                        });
                        return SourceStep::Done;
                    }
                }
                SourceStep::Emit(jobs)
            }
            SourceStep::Done => SourceStep::Done,
        }
    }
}

/// Interleaves the simulation with adversary callbacks, then scores the
/// run against the exact optimum on everything that was announced.
pub fn run_against_adversary(
    algorithm: &mut dyn OnlineAlgorithm,
    adversary: &mut dyn Adversary,
) -> Result<AdversaryOutcome, AdversaryError> {
    let notice = adversary.declared_notice().clone();
    let model = adversary.weight_model().clone();
    let designed_ratio = adversary.designed_ratio();

    let mut source = CheckedSource {
        inner: adversary,
        notice: notice.clone(),
        error: None,
    };
    let outcome = drive(&mut source, algorithm)?;
    if let Some(err) = source.error {
        return Err(err);
    }

    let instance = Instance::new(outcome.announced, notice, model);
    let alg_value = schedule_value(&instance, &outcome.executed)?;
    let alg_schedule = Schedule {
        entries: outcome.executed,
        value: alg_value.clone(),
    };
    let (opt_schedule, solver_stats) = optimal_offline(&instance);
    let opt_value = opt_schedule.value.clone();

    let ratio = if opt_value.is_zero() {
        match &opt_value {
            Weight::Exact(_) => Weight::Exact(Rat::one()),
            Weight::Approx(_) => Weight::Approx(1.0),
        }
    } else {
        alg_value.div(&opt_value)
    };
    let unbounded = alg_value.is_zero() && !opt_value.is_zero();

    Ok(AdversaryOutcome {
        instance,
        alg_value: alg_value.clone(),
        opt_value,
        ratio,
        unbounded,
        designed_ratio,
        alg_schedule,
        opt_schedule,
        trace: SimulationTrace {
            events: outcome.events,
            value: alg_value,
        },
        solver_stats,
    })
}

fn tp(r: Rat) -> TimePoint {
    TimePoint::new(r).expect("adversary times are nonnegative")
}

fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

enum Phase {
    Opening,
    AwaitingCommitment,
    Spent,
}

/// Forces the proportional ratio down toward `t/(2t+1)`.
///
/// A unit job with a huge deadline is announced with exactly the required
/// notice. The moment the algorithm commits to it at `s1`, a batch lands at
/// `s1 + g` (with `g = eps*t*(2t+1)/(2+t)`): a long zero-slack job released
/// at `s1 + 1 - 2g`, plus a chain of zero-slack links of length `g/t`
/// tiling `[s1 + 2g, s1 + 1 - 2g]`. All of them must run strictly inside
/// the committed job's execution, so the algorithm keeps only its unit,
/// while the optimum runs everything with the unit job parked after the
/// batch. Lead times equal `t * p` exactly throughout; the long job's
/// length is `(1 - 3g)/t`, the most its announcement instant permits.
pub struct ProportionalLbAdversary {
    notice: Rat,
    gamma: Rat,
    model: WeightModel,
    phase: Phase,
    opener_id: JobId,
}

impl ProportionalLbAdversary {
    pub fn new(t: Rat, eps: Rat) -> Result<Self, AdversaryError> {
        if !t.is_positive() || t > int(1) {
            return Err(AdversaryError::Guard(format!(
                "t must be in (0, 1], got {t}"
            )));
        }
        if !eps.is_positive() {
            return Err(AdversaryError::Guard(format!("eps must be positive, got {eps}")));
        }
        let gamma = &eps * &t * (int(2) * &t + int(1)) / (int(2) + &t);
        if gamma >= Rat::new(BigInt::from(1), BigInt::from(4)) {
            return Err(AdversaryError::Guard(format!(
                "eps too large: gamma = {gamma} must stay below 1/4"
            )));
        }
        Ok(Self {
            notice: t,
            gamma,
            model: WeightModel::Proportional,
            phase: Phase::Opening,
            opener_id: JobId(0),
        })
    }

    pub fn gamma(&self) -> &Rat {
        &self.gamma
    }

    /// Total value the emitted instance admits offline:
    /// `1 + (1 - 3g)/t + (1 - 4g)`.
    pub fn emitted_optimum(&self) -> Rat {
        let t = &self.notice;
        let g = &self.gamma;
        int(1) + (int(1) - int(3) * g) / t + (int(1) - int(4) * g)
    }

    fn long_job_length(&self) -> Rat {
        (int(1) - int(3) * &self.gamma) / &self.notice
    }

    fn chain_total(&self) -> Rat {
        int(1) - int(4) * &self.gamma
    }
}

impl Adversary for ProportionalLbAdversary {
    fn declared_notice(&self) -> &Rat {
        &self.notice
    }

    fn weight_model(&self) -> &WeightModel {
        &self.model
    }

    fn designed_ratio(&self) -> Weight {
        Weight::Exact(crate::competitive_bound(&self.notice))
    }

    fn next(&mut self, stimulus: Stimulus<'_>) -> SourceStep {
        match (&self.phase, stimulus) {
            (Phase::Opening, Stimulus::Begin) => {
                self.phase = Phase::AwaitingCommitment;
                // deadline large enough that the optimum parks this job
                // after the whole batch, as an explicit rational
                let deadline = &self.notice
                    + &int(1)
                    + &self.long_job_length()
                    + &self.chain_total()
                    + &int(10);
                SourceStep::Emit(vec![Job::new(
                    self.opener_id,
                    tp(Rat::zero()),
                    tp(self.notice.clone()),
                    tp(int(1)),
                    tp(deadline),
                )])
            }
            (Phase::AwaitingCommitment, Stimulus::Started(job, at)) if job.id == self.opener_id => {
                self.phase = Phase::Spent;
                let s1 = at.as_rat();
                let g = &self.gamma;
                let t = &self.notice;
                let announce = tp(s1 + g);
                let mut jobs = Vec::new();

                let long_release = s1 + int(1) - int(2) * g;
                let long_len = self.long_job_length();
                jobs.push(Job::new(
                    JobId(1),
                    announce.clone(),
                    tp(long_release.clone()),
                    tp(long_len.clone()),
                    tp(&long_release + &long_len),
                ));

                // zero-slack links of length g/t tiling [s1+2g, s1+1-2g],
                // the last one clipped, zero-length links skipped
                let step = g / t;
                let cap = long_release;
                let mut cursor = s1 + int(2) * g;
                let mut id = 2u32;
                while cursor < cap {
                    let end = (&cursor + &step).min(cap.clone());
                    jobs.push(Job::new(
                        JobId(id),
                        announce.clone(),
                        tp(cursor.clone()),
                        tp(&end - &cursor),
                        tp(end.clone()),
                    ));
                    id += 1;
                    cursor = end;
                }
                SourceStep::Emit(jobs)
            }
            (_, Stimulus::Started(..)) => SourceStep::Emit(Vec::new()),
            _ => SourceStep::Done,
        }
    }
}

/// Unweighted case: advance notice buys nothing.
///
/// One tight unit job is announced; committing to it pins the machine on
/// `[t, t+1)`. The adversary then announces `n` unit-weight jobs whose
/// windows tile the inside of that run, each with exact notice, each
/// impossible for the busy machine and trivial for the optimum.
pub struct UnweightedAdversary {
    notice: Rat,
    count: u32,
    model: WeightModel,
    phase: Phase,
    opener_id: JobId,
}

impl UnweightedAdversary {
    pub fn new(t: Rat, count: u32) -> Result<Self, AdversaryError> {
        if !t.is_positive() {
            return Err(AdversaryError::Guard(format!("t must be positive, got {t}")));
        }
        if count == 0 {
            return Err(AdversaryError::Guard("count must be at least 1".into()));
        }
        Ok(Self {
            notice: t,
            count,
            model: WeightModel::Unweighted,
            phase: Phase::Opening,
            opener_id: JobId(0),
        })
    }
}

impl Adversary for UnweightedAdversary {
    fn declared_notice(&self) -> &Rat {
        &self.notice
    }

    fn weight_model(&self) -> &WeightModel {
        &self.model
    }

    fn designed_ratio(&self) -> Weight {
        Weight::Exact(Rat::new(BigInt::one(), BigInt::from(self.count)))
    }

    fn next(&mut self, stimulus: Stimulus<'_>) -> SourceStep {
        match (&self.phase, stimulus) {
            (Phase::Opening, Stimulus::Begin) => {
                self.phase = Phase::AwaitingCommitment;
                SourceStep::Emit(vec![Job::new(
                    self.opener_id,
                    tp(Rat::zero()),
                    tp(self.notice.clone()),
                    tp(int(1)),
                    tp(&self.notice + &int(1)),
                )])
            }
            (Phase::AwaitingCommitment, Stimulus::Started(job, _)) if job.id == self.opener_id => {
                self.phase = Phase::Spent;
                let t = &self.notice;
                let n = int(self.count as i64);
                // window i is [t + (i-1)/n, t + i/n]; processing 1/(n(t+2))
                // leaves slack inside every window
                let p = int(1) / (&n * (t + int(2)));
                let mut jobs = Vec::new();
                for i in 0..self.count {
                    let window_start = t + int(i as i64) / &n;
                    let announce = window_start.clone();
                    let release = &announce + &(t * &p);
                    let deadline = &window_start + &(int(1) / &n);
                    jobs.push(Job::new(
                        JobId(i + 1),
                        tp(announce),
                        tp(release),
                        tp(p.clone()),
                        tp(deadline),
                    ));
                }
                SourceStep::Emit(jobs)
            }
            (_, Stimulus::Started(..)) => SourceStep::Emit(Vec::new()),
            _ => SourceStep::Done,
        }
    }
}

/// Convex weight curves: one exchange kills any constant ratio.
///
/// With `f(p) = p^k` and `k = ln(n) / ln((1 - 3*eps)/t)`, the follow-up job
/// of length `(1 - 3*eps)/t` is worth exactly `n` while the committed unit
/// job is worth 1. The follow-up is released strictly inside the unit
/// job's run and has zero slack, so the committed machine must let it go.
pub struct CBenevolentAdversary {
    notice: Rat,
    eps: Rat,
    count: u32,
    model: WeightModel,
    phase: Phase,
    opener_id: JobId,
}

impl CBenevolentAdversary {
    pub fn new(t: Rat, eps: Rat, count: u32) -> Result<Self, AdversaryError> {
        if !t.is_positive() || t >= int(1) {
            return Err(AdversaryError::Guard(format!(
                "t must be in (0, 1), got {t}"
            )));
        }
        if !eps.is_positive() {
            return Err(AdversaryError::Guard(format!("eps must be positive, got {eps}")));
        }
        let base = (int(1) - int(3) * &eps) / &t;
        if base <= int(1) {
            return Err(AdversaryError::Guard(format!(
                "(1 - 3*eps)/t = {base} must exceed 1"
            )));
        }
        let exponent = Self::exponent_for(&base, count);
        if !exponent.is_finite() || exponent < 1.0 {
            return Err(AdversaryError::Guard(format!(
                "count {count} too small for base {base}: exponent {exponent} < 1"
            )));
        }
        Ok(Self {
            notice: t,
            eps,
            count,
            model: WeightModel::PowerBenevolent { exponent },
            phase: Phase::Opening,
            opener_id: JobId(0),
        })
    }

    fn exponent_for(base: &Rat, count: u32) -> f64 {
        let base = base.to_f64().unwrap_or(f64::NAN);
        (count as f64).ln() / base.ln()
    }

    pub fn exponent(&self) -> f64 {
        match self.model {
            WeightModel::PowerBenevolent { exponent } => exponent,
            _ => unreachable!(),
        }
    }

    fn follow_up_length(&self) -> Rat {
        (int(1) - int(3) * &self.eps) / &self.notice
    }
}

impl Adversary for CBenevolentAdversary {
    fn declared_notice(&self) -> &Rat {
        &self.notice
    }

    fn weight_model(&self) -> &WeightModel {
        &self.model
    }

    fn designed_ratio(&self) -> Weight {
        Weight::Approx(1.0 / self.count as f64)
    }

    fn next(&mut self, stimulus: Stimulus<'_>) -> SourceStep {
        match (&self.phase, stimulus) {
            (Phase::Opening, Stimulus::Begin) => {
                self.phase = Phase::AwaitingCommitment;
                SourceStep::Emit(vec![Job::new(
                    self.opener_id,
                    tp(Rat::zero()),
                    tp(self.notice.clone()),
                    tp(int(1)),
                    tp(&self.notice + &int(1)),
                )])
            }
            (Phase::AwaitingCommitment, Stimulus::Started(job, _)) if job.id == self.opener_id => {
                self.phase = Phase::Spent;
                let t = &self.notice;
                let eps = &self.eps;
                let announce = t + eps;
                let release = t + &int(1) - int(2) * eps;
                let length = self.follow_up_length();
                SourceStep::Emit(vec![Job::new(
                    JobId(1),
                    tp(announce),
                    tp(release.clone()),
                    tp(length.clone()),
                    tp(&release + &length),
                )])
            }
            (_, Stimulus::Started(..)) => SourceStep::Emit(Vec::new()),
            _ => SourceStep::Done,
        }
    }
}
