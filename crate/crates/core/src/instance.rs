use std::collections::HashSet;
use std::fmt;

use num_traits::Signed;

use crate::job::{Job, JobId};
use crate::time::{format_rat, Rat, TimeError, TimePoint};
use crate::weight::WeightModel;

/// A problem instance: jobs in announcement order, the declared notice
/// level `t`, and the weight model shared by all jobs.
#[derive(Clone, PartialEq, Debug)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub notice: Rat,
    pub weights: WeightModel,
}

impl Instance {
    pub fn new(jobs: Vec<Job>, notice: Rat, weights: WeightModel) -> Self {
        Self {
            jobs,
            notice,
            weights,
        }
    }

    pub fn empty(notice: Rat, weights: WeightModel) -> Self {
        Self::new(Vec::new(), notice, weights)
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.jobs.iter().find(|j| j.id == id)
    }

    /// Multiplies every announcement, release, processing time and deadline
    /// by a positive rational. The notice level is a ratio of times and is
    /// unchanged; validity is preserved exactly.
    pub fn scaled(&self, factor: &Rat) -> Result<Instance, TimeError> {
        let mut jobs = Vec::with_capacity(self.jobs.len());
        for j in &self.jobs {
            jobs.push(Job::new(
                j.id,
                j.announce.scale(factor)?,
                j.release.scale(factor)?,
                j.processing.scale(factor)?,
                j.deadline.scale(factor)?,
            ));
        }
        Ok(Instance::new(jobs, self.notice.clone(), self.weights.clone()))
    }
}

/// A broken instance rule. Violations are data for reporting; nothing here
/// is a failure of the checking machinery itself.
#[derive(Clone, PartialEq, Debug)]
pub enum RuleViolation {
    /// `announce > release`.
    AnnounceAfterRelease { job: JobId },
    /// `release + processing > deadline`; carries the shortfall.
    WindowTooSmall { job: JobId, shortfall: Rat },
    /// `release - announce < t * processing`; carries the missing amount.
    NoticeDeficit { job: JobId, deficit: Rat },
    /// `processing <= 0`.
    NonPositiveProcessing { job: JobId },
    DuplicateId { job: JobId },
    /// Jobs must be listed in nondecreasing announcement order.
    AnnouncementsOutOfOrder { position: usize },
    /// Declared notice level is negative.
    NegativeNotice,
    /// Power model exponent below one or not finite.
    BadExponent { exponent: f64 },
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleViolation::AnnounceAfterRelease { job } => {
                write!(f, "job {job}: announced after its release")
            }
            RuleViolation::WindowTooSmall { job, shortfall } => write!(
                f,
                "job {job}: window misses the processing time by {}",
                format_rat(shortfall)
            ),
            RuleViolation::NoticeDeficit { job, deficit } => write!(
                f,
                "job {job}: notice deficit {} (needs release - announce >= t * processing)",
                format_rat(deficit)
            ),
            RuleViolation::NonPositiveProcessing { job } => {
                write!(f, "job {job}: processing time is not positive")
            }
            RuleViolation::DuplicateId { job } => write!(f, "job id {job} appears more than once"),
            RuleViolation::AnnouncementsOutOfOrder { position } => {
                write!(f, "job at position {position} announced before its predecessor")
            }
            RuleViolation::NegativeNotice => write!(f, "declared notice level is negative"),
            RuleViolation::BadExponent { exponent } => {
                write!(f, "power exponent {exponent} must be finite and >= 1")
            }
        }
    }
}

/// Checks every per-job rule (`a <= r`, `r + p <= d`, `r - a >= t*p`,
/// `p > 0`), id uniqueness, announcement ordering, and model parameters.
/// An empty report means the instance is valid.
pub fn validate_instance(instance: &Instance) -> Vec<RuleViolation> {
    let mut out = Vec::new();

    if instance.notice.is_negative() {
        out.push(RuleViolation::NegativeNotice);
    }
    if let WeightModel::PowerBenevolent { exponent } = instance.weights {
        if !exponent.is_finite() || exponent < 1.0 {
            out.push(RuleViolation::BadExponent { exponent });
        }
    }

    let mut seen = HashSet::new();
    let mut prev_announce: Option<&TimePoint> = None;
    for (position, job) in instance.jobs.iter().enumerate() {
        if !seen.insert(job.id) {
            out.push(RuleViolation::DuplicateId { job: job.id });
        }
        if let Some(prev) = prev_announce {
            if &job.announce < prev {
                out.push(RuleViolation::AnnouncementsOutOfOrder { position });
            }
        }
        prev_announce = Some(&job.announce);

        if !job.processing.as_rat().is_positive() {
            out.push(RuleViolation::NonPositiveProcessing { job: job.id });
        }
        if job.announce > job.release {
            out.push(RuleViolation::AnnounceAfterRelease { job: job.id });
        }
        let end = job.release.as_rat() + job.processing.as_rat();
        if &end > job.deadline.as_rat() {
            out.push(RuleViolation::WindowTooSmall {
                job: job.id,
                shortfall: &end - job.deadline.as_rat(),
            });
        }
        let required = &instance.notice * job.processing.as_rat();
        let notice = job.release.as_rat() - job.announce.as_rat();
        if notice < required {
            out.push(RuleViolation::NoticeDeficit {
                job: job.id,
                deficit: &required - &notice,
            });
        }
    }
    out
}
