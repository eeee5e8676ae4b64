use std::collections::HashSet;

use crate::instance::Instance;
use crate::job::JobId;
use crate::time::TimePoint;
use crate::weight::{weight_of, Weight, WeightError};

/// One start commitment: job `job` begins at `start` and runs for its full
/// processing time. Execution intervals are half-open `[start, start + p)`,
/// so schedules may abut exactly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScheduleEntry {
    pub job: JobId,
    pub start: TimePoint,
}

impl ScheduleEntry {
    pub fn new(job: JobId, start: TimePoint) -> Self {
        Self { job, start }
    }
}

/// A set of start commitments plus the total value they earn.
#[derive(Clone, PartialEq, Debug)]
pub struct Schedule {
    pub entries: Vec<ScheduleEntry>,
    pub value: Weight,
}

impl Schedule {
    pub fn empty(instance: &Instance) -> Self {
        Self {
            entries: Vec::new(),
            value: Weight::zero_for(&instance.weights),
        }
    }

    /// Builds a schedule from entries, validating feasibility and computing
    /// the value under the instance's weight model.
    pub fn from_entries(
        instance: &Instance,
        entries: Vec<ScheduleEntry>,
    ) -> Result<Self, ScheduleError> {
        let value = schedule_value(instance, &entries)?;
        Ok(Self { entries, value })
    }

    pub fn job_ids(&self) -> Vec<JobId> {
        let mut ids: Vec<JobId> = self.entries.iter().map(|e| e.job).collect();
        ids.sort();
        ids
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("schedule references unknown job id {0}")]
    UnknownJob(JobId),
    #[error("schedule is infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// True iff every entry respects its job's window and the half-open
/// execution intervals are pairwise disjoint. Unknown job ids are errors,
/// not `false`: they indicate malformed input rather than an infeasible
/// schedule.
pub fn is_feasible_schedule(
    instance: &Instance,
    entries: &[ScheduleEntry],
) -> Result<bool, ScheduleError> {
    let mut seen = HashSet::new();
    let mut runs: Vec<(TimePoint, TimePoint)> = Vec::with_capacity(entries.len());
    for entry in entries {
        let job = instance
            .job(entry.job)
            .ok_or(ScheduleError::UnknownJob(entry.job))?;
        if !seen.insert(entry.job) {
            return Ok(false);
        }
        if entry.start < job.release {
            return Ok(false);
        }
        let end = job.end_for_start(&entry.start);
        if end > job.deadline {
            return Ok(false);
        }
        runs.push((entry.start.clone(), end));
    }
    runs.sort();
    for pair in runs.windows(2) {
        // half-open: equal end/start abut, that's fine
        if pair[1].0 < pair[0].1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Total value of a feasible schedule; exact for the exact models.
pub fn schedule_value(
    instance: &Instance,
    entries: &[ScheduleEntry],
) -> Result<Weight, ScheduleError> {
    if !is_feasible_schedule(instance, entries)? {
        return Err(ScheduleError::Infeasible(
            "window or overlap constraint violated".into(),
        ));
    }
    let mut total = Weight::zero_for(&instance.weights);
    for entry in entries {
        let job = instance.job(entry.job).expect("checked above");
        total = total.add(&weight_of(&instance.weights, &job.processing)?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::job::Job;
    use crate::time::rat;
    use crate::weight::WeightModel;

    fn tp(n: i64, d: i64) -> TimePoint {
        TimePoint::ratio(n, d).unwrap()
    }

    fn instance(jobs: Vec<Job>, weights: WeightModel) -> Instance {
        Instance::new(jobs, rat(0, 1), weights)
    }

    fn loose_job(id: u32, p: (i64, i64)) -> Job {
        Job::new(
            JobId(id),
            tp(0, 1),
            tp(0, 1),
            tp(p.0, p.1),
            tp(100, 1),
        )
    }

    #[test]
    fn empty_schedule_is_feasible() {
        let inst = instance(vec![], WeightModel::Proportional);
        assert!(is_feasible_schedule(&inst, &[]).unwrap());
    }

    #[test]
    fn abutting_intervals_are_fine() {
        let inst = instance(
            vec![loose_job(0, (2, 1)), loose_job(1, (1, 1))],
            WeightModel::Proportional,
        );
        let entries = vec![
            ScheduleEntry::new(JobId(0), tp(0, 1)),
            ScheduleEntry::new(JobId(1), tp(2, 1)),
        ];
        assert!(is_feasible_schedule(&inst, &entries).unwrap());
    }

    #[test]
    fn overlapping_intervals_are_not() {
        let inst = instance(
            vec![loose_job(0, (2, 1)), loose_job(1, (2, 1))],
            WeightModel::Proportional,
        );
        let entries = vec![
            ScheduleEntry::new(JobId(0), tp(0, 1)),
            ScheduleEntry::new(JobId(1), tp(1, 1)),
        ];
        assert!(!is_feasible_schedule(&inst, &entries).unwrap());
    }

    #[test]
    fn unknown_job_is_an_error() {
        let inst = instance(vec![], WeightModel::Proportional);
        let entries = vec![ScheduleEntry::new(JobId(9), tp(0, 1))];
        assert_eq!(
            is_feasible_schedule(&inst, &entries),
            Err(ScheduleError::UnknownJob(JobId(9)))
        );
    }

    #[test]
    fn proportional_value_adds_processing_times() {
        let inst = instance(
            vec![loose_job(0, (1, 1)), loose_job(1, (3, 2))],
            WeightModel::Proportional,
        );
        let entries = vec![
            ScheduleEntry::new(JobId(0), tp(0, 1)),
            ScheduleEntry::new(JobId(1), tp(1, 1)),
        ];
        assert_eq!(
            schedule_value(&inst, &entries).unwrap(),
            Weight::Exact(rat(5, 2))
        );
    }

    #[test]
    fn unweighted_value_counts_entries() {
        let jobs: Vec<Job> = (0..4).map(|i| loose_job(i, (1, 1))).collect();
        let inst = instance(jobs, WeightModel::Unweighted);
        let entries: Vec<ScheduleEntry> = (0..4)
            .map(|i| ScheduleEntry::new(JobId(i), tp(i as i64, 1)))
            .collect();
        assert_eq!(
            schedule_value(&inst, &entries).unwrap(),
            Weight::Exact(rat(4, 1))
        );
    }

    #[test]
    fn infeasible_schedule_has_no_value() {
        let inst = instance(vec![loose_job(0, (2, 1)), loose_job(1, (2, 1))], WeightModel::Proportional);
        let entries = vec![
            ScheduleEntry::new(JobId(0), tp(0, 1)),
            ScheduleEntry::new(JobId(1), tp(1, 1)),
        ];
        assert!(matches!(
            schedule_value(&inst, &entries),
            Err(ScheduleError::Infeasible(_))
        ));
    }
}
