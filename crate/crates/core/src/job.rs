use std::fmt;

use serde::{Deserialize, Serialize};

use crate::time::{Span, TimePoint};

/// Identifier of a job within one instance. Dense small integers by
/// convention; uniqueness is checked by validation, not by construction.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct JobId(pub u32);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One job: announced at `announce`, allowed to run uninterrupted for
/// exactly `processing` time units anywhere inside `[release, deadline]`.
///
/// Fields are public and unchecked; [`crate::instance::validate_instance`]
/// reports rule violations as data rather than refusing construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Job {
    pub id: JobId,
    pub announce: TimePoint,
    pub release: TimePoint,
    pub processing: Span,
    pub deadline: TimePoint,
}

impl Job {
    pub fn new(
        id: JobId,
        announce: TimePoint,
        release: TimePoint,
        processing: Span,
        deadline: TimePoint,
    ) -> Self {
        Self {
            id,
            announce,
            release,
            processing,
            deadline,
        }
    }

    /// Latest instant the job may still start, `deadline - processing`.
    /// `None` when the window cannot fit the job at all.
    pub fn latest_start(&self) -> Option<TimePoint> {
        self.deadline.checked_sub(&self.processing)
    }

    /// End of execution for a start at `s`.
    pub fn end_for_start(&self, s: &TimePoint) -> TimePoint {
        s + &self.processing
    }

    /// `release - announce`; `None` when announced after release.
    pub fn notice(&self) -> Option<Span> {
        self.release.checked_sub(&self.announce)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(n: i64, d: i64) -> TimePoint {
        TimePoint::ratio(n, d).unwrap()
    }

    #[test]
    fn latest_start_and_notice() {
        let j = Job::new(JobId(0), tp(0, 1), tp(1, 1), tp(1, 1), tp(2, 1));
        assert_eq!(j.latest_start(), Some(tp(1, 1)));
        assert_eq!(j.notice(), Some(tp(1, 1)));
        assert_eq!(j.end_for_start(&tp(3, 2)), tp(5, 2));
    }

    #[test]
    fn inverted_window_has_no_latest_start() {
        let j = Job::new(JobId(0), tp(0, 1), tp(0, 1), tp(3, 1), tp(2, 1));
        assert_eq!(j.latest_start(), None);
    }
}
