//! Exact optimal offline solvers.
//!
//! Two independent search strategies sit behind one tie-break contract:
//!
//! * [`brute_force_opt`] exhausts every ordering of every subset (guarded to
//!   eight jobs) and is the oracle;
//! * [`optimal_offline`] is a depth-first branch-and-bound over job
//!   orderings and is the solver everything else calls.
//!
//! Both enumerate only earliest-start schedules: for a fixed running order
//! each successor's start is `max(release, predecessor end)`, which is
//! monotone in the predecessor's end, so starting any job earlier within
//! its window never invalidates a later job. Every ordering therefore has
//! an earliest-start representative that is feasible whenever the ordering
//! is feasible at all, and has the same value.
//!
//! Ties between equal-value optima go to the lexicographically smallest
//! sorted job-id set, then to the lexicographically smallest start vector
//! taken in job-id order. This makes both solvers fully deterministic and
//! scale-invariant.

use std::time::{Duration, Instant};

use num_traits::Signed;

use crate::instance::Instance;
use crate::job::{Job, JobId};
use crate::schedule::{Schedule, ScheduleEntry};
use crate::time::TimePoint;
use crate::weight::{weight_of, Weight};

/// Hard guard on the exhaustive oracle.
pub const BRUTE_FORCE_MAX_JOBS: usize = 8;

#[derive(Debug, Clone, Default)]
pub struct SolverConfig {
    /// Abort the branch-and-bound after this many explored nodes.
    /// `None` means unlimited.
    pub node_limit: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct SolverStats {
    pub nodes: u64,
    pub prunes: u64,
    pub wall: Duration,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("solver node limit {limit} exceeded")]
    NodeLimit { limit: u64 },
    #[error("brute force handles at most {max} jobs, instance has {count}")]
    TooManyJobs { count: usize, max: usize },
}

/// Chains starts left-to-right: `s_1 = max(r_1, floor)`,
/// `s_{k+1} = max(r_{k+1}, s_k + p_k)`. Returns `None` when some job would
/// miss its deadline under this order.
pub fn earliest_start_schedule<'a, I>(jobs: I, floor: &TimePoint) -> Option<Vec<ScheduleEntry>>
where
    I: IntoIterator<Item = &'a Job>,
{
    let mut entries = Vec::new();
    let mut free = floor.clone();
    for job in jobs {
        let start = free.max(job.release.clone());
        let end = job.end_for_start(&start);
        if end > job.deadline {
            return None;
        }
        entries.push(ScheduleEntry::new(job.id, start));
        free = end;
    }
    Some(entries)
}

/// Per-job data shared by both searches.
struct SolverJob {
    id: JobId,
    release: TimePoint,
    processing: TimePoint,
    latest_start: TimePoint,
    weight: Weight,
}

fn prepare_jobs(instance: &Instance) -> Vec<SolverJob> {
    let mut out = Vec::with_capacity(instance.jobs.len());
    for job in &instance.jobs {
        if !job.processing.as_rat().is_positive() {
            continue;
        }
        let latest_start = match job.latest_start() {
            Some(t) => t,
            None => continue,
        };
        if job.release > latest_start {
            continue;
        }
        let weight = weight_of(&instance.weights, &job.processing).expect("positive processing");
        out.push(SolverJob {
            id: job.id,
            release: job.release.clone(),
            processing: job.processing.clone(),
            latest_start,
            weight,
        });
    }
    out
}

struct Candidate {
    value: Weight,
    ids: Vec<JobId>,
    starts_by_id: Vec<TimePoint>,
    entries: Vec<ScheduleEntry>,
}

fn make_candidate(entries: &[ScheduleEntry], value: Weight) -> Candidate {
    let mut pairs: Vec<(JobId, TimePoint)> = entries
        .iter()
        .map(|e| (e.job, e.start.clone()))
        .collect();
    pairs.sort_by_key(|a| a.0);
    Candidate {
        value,
        ids: pairs.iter().map(|p| p.0).collect(),
        starts_by_id: pairs.into_iter().map(|p| p.1).collect(),
        entries: entries.to_vec(),
    }
}

/// The tie-break contract: higher value, then smaller sorted id set, then
/// smaller start vector in id order.
fn improves(new: &Candidate, old: &Candidate) -> bool {
    match new.value.partial_cmp(&old.value) {
        Some(std::cmp::Ordering::Greater) => return true,
        Some(std::cmp::Ordering::Less) => return false,
        _ => {}
    }
    match new.ids.cmp(&old.ids) {
        std::cmp::Ordering::Less => return true,
        std::cmp::Ordering::Greater => return false,
        std::cmp::Ordering::Equal => {}
    }
    new.starts_by_id < old.starts_by_id
}

fn candidate_into_schedule(c: Candidate) -> Schedule {
    Schedule {
        entries: c.entries,
        value: c.value,
    }
}

/// Exhaustive oracle: maximizes over every ordering of every subset, each
/// evaluated through [`earliest_start_schedule`] with floor zero. Errors if
/// the instance exceeds [`BRUTE_FORCE_MAX_JOBS`].
pub fn brute_force_opt(instance: &Instance) -> Result<Schedule, SolverError> {
    if instance.jobs.len() > BRUTE_FORCE_MAX_JOBS {
        return Err(SolverError::TooManyJobs {
            count: instance.jobs.len(),
            max: BRUTE_FORCE_MAX_JOBS,
        });
    }
    let jobs: Vec<&Job> = instance.jobs.iter().collect();
    let zero = TimePoint::zero();
    let mut best = make_candidate(&[], Weight::zero_for(&instance.weights));
    let mut sequence: Vec<&Job> = Vec::new();
    let mut used = vec![false; jobs.len()];

    fn descend<'a>(
        jobs: &[&'a Job],
        used: &mut Vec<bool>,
        sequence: &mut Vec<&'a Job>,
        floor: &TimePoint,
        instance: &Instance,
        best: &mut Candidate,
    ) {
        // the current sequence is one (subset, ordering) candidate
        if let Some(entries) = earliest_start_schedule(sequence.iter().copied(), floor) {
            let mut value = Weight::zero_for(&instance.weights);
            for job in sequence.iter() {
                value = value.add(&weight_of(&instance.weights, &job.processing).expect("p > 0"));
            }
            let cand = make_candidate(&entries, value);
            if improves(&cand, best) {
                *best = cand;
            }
        } else {
            // extensions of an infeasible ordering stay infeasible
            return;
        }
        for i in 0..jobs.len() {
            if used[i] {
                continue;
            }
            if !jobs[i].processing.as_rat().is_positive() {
                continue;
            }
            used[i] = true;
            sequence.push(jobs[i]);
            descend(jobs, used, sequence, floor, instance, best);
            sequence.pop();
            used[i] = false;
        }
    }

    descend(&jobs, &mut used, &mut sequence, &zero, instance, &mut best);
    Ok(candidate_into_schedule(best))
}

struct Search<'a> {
    jobs: &'a [SolverJob],
    best: Option<Candidate>,
    nodes: u64,
    prunes: u64,
    node_limit: Option<u64>,
}

impl<'a> Search<'a> {
    /// `alive` holds indices of jobs individually feasible at `floor`
    /// (`floor <= latest_start`), kept so the remaining-weight bound is a
    /// plain sum over it.
    fn run(
        &mut self,
        alive: &[usize],
        floor: &TimePoint,
        value: &Weight,
        entries: &mut Vec<ScheduleEntry>,
    ) -> Result<(), SolverError> {
        let jobs = self.jobs;
        self.nodes += 1;
        if let Some(limit) = self.node_limit {
            if self.nodes > limit {
                return Err(SolverError::NodeLimit { limit });
            }
        }
        if alive.is_empty() {
            let cand = make_candidate(entries, value.clone());
            if self.best.as_ref().is_none_or(|b| improves(&cand, b)) {
                self.best = Some(cand);
            }
            return Ok(());
        }

        // Suffix sums over latest-start order give, for any machine-free
        // time F, the total weight of jobs that could still start.
        let mut by_latest: Vec<usize> = alive.to_vec();
        by_latest.sort_by(|&x, &y| {
            jobs[x]
                .latest_start
                .cmp(&jobs[y].latest_start)
                .then(jobs[x].id.cmp(&jobs[y].id))
        });
        let mut suffix = vec![value.zero_like(); by_latest.len() + 1];
        for i in (0..by_latest.len()).rev() {
            suffix[i] = suffix[i + 1].add(&jobs[by_latest[i]].weight);
        }

        // Branch on which alive job runs next, earliest canonical start
        // first. Among clipped-identical jobs only the smallest id branches
        // here; a completion using another member first can be id-swapped
        // into one this branch covers, with equal value and no worse
        // tie-break.
        let mut order: Vec<(TimePoint, usize)> = alive
            .iter()
            .map(|&k| (floor.clone().max(jobs[k].release.clone()), k))
            .collect();
        order.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| jobs[a.1].latest_start.cmp(&jobs[b.1].latest_start))
                .then_with(|| jobs[a.1].processing.cmp(&jobs[b.1].processing))
                .then_with(|| jobs[a.1].id.cmp(&jobs[b.1].id))
        });

        let mut previous: Option<usize> = None;
        for i in 0..order.len() {
            let (ref start, k) = order[i];
            if let Some(p) = previous {
                let (ref pstart, pk) = order[p];
                if pstart == start
                    && jobs[pk].latest_start == jobs[k].latest_start
                    && jobs[pk].processing == jobs[k].processing
                {
                    continue;
                }
            }
            previous = Some(i);

            let job = &jobs[k];
            let end = job.end_for_start(start);
            let pos = by_latest.partition_point(|&m| jobs[m].latest_start < end);
            let mut avail = suffix[pos].clone();
            if job.latest_start >= end {
                avail = avail.sub(&job.weight);
            }
            let child_value = value.add(&job.weight);
            let bound = child_value.add(&avail);
            if let Some(best) = &self.best {
                if bound < best.value {
                    self.prunes += 1;
                    continue;
                }
            }
            let child_alive: Vec<usize> = alive
                .iter()
                .copied()
                .filter(|&m| m != k && jobs[m].latest_start >= end)
                .collect();
            entries.push(ScheduleEntry::new(job.id, start.clone()));
            self.run(&child_alive, &end, &child_value, entries)?;
            entries.pop();
        }
        Ok(())
    }
}

impl SolverJob {
    fn end_for_start(&self, s: &TimePoint) -> TimePoint {
        s + &self.processing
    }
}

/// Depth-first branch-and-bound. The pruning bound is the weakest sound
/// one: value so far plus the total weight of jobs still individually
/// feasible. Pruning is strict-only so equal-value optima survive for the
/// tie-break.
pub fn optimal_offline_with(
    instance: &Instance,
    config: &SolverConfig,
) -> Result<(Schedule, SolverStats), SolverError> {
    let started = Instant::now();
    let jobs = prepare_jobs(instance);
    let mut search = Search {
        jobs: &jobs,
        best: None,
        nodes: 0,
        prunes: 0,
        node_limit: config.node_limit,
    };
    let alive: Vec<usize> = (0..jobs.len()).collect();
    let mut entries = Vec::new();
    search.run(
        &alive,
        &TimePoint::zero(),
        &Weight::zero_for(&instance.weights),
        &mut entries,
    )?;
    let best = search
        .best
        .unwrap_or_else(|| make_candidate(&[], Weight::zero_for(&instance.weights)));
    let stats = SolverStats {
        nodes: search.nodes,
        prunes: search.prunes,
        wall: started.elapsed(),
    };
    Ok((candidate_into_schedule(best), stats))
}

/// [`optimal_offline_with`] under the default (unlimited) configuration.
pub fn optimal_offline(instance: &Instance) -> (Schedule, SolverStats) {
    optimal_offline_with(instance, &SolverConfig::default()).expect("no node limit configured")
}
