//! Event-driven continuous-time simulation of online algorithms.
//!
//! The machine runs at most one job at a time; a started job is never
//! revoked or restarted. Events are processed at exact rational times, and
//! at one instant the order is fixed: finish the running job, expire jobs
//! that can no longer start, execute a planned start, then deliver
//! announcements (simultaneous announcements arrive as one batch and
//! trigger a single replan). Identical inputs give byte-identical traces.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::instance::Instance;
use crate::job::{Job, JobId};
use crate::schedule::{schedule_value, Schedule, ScheduleEntry, ScheduleError};
use crate::solver::{optimal_offline_with, SolverConfig, SolverError, SolverStats};
use crate::time::{Rat, TimePoint};
use crate::weight::{weight_of, Weight, WeightModel};

/// What the algorithm may see of the machine when called back.
#[derive(Clone, Debug)]
pub struct MachineView {
    pub now: TimePoint,
    pub running: Option<RunningJob>,
}

#[derive(Clone, Debug)]
pub struct RunningJob {
    pub job: JobId,
    pub end: TimePoint,
}

/// Intended future starts. Replaced wholesale by the next plan; only an
/// executed start is a commitment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Plan {
    pub starts: Vec<ScheduleEntry>,
}

impl Plan {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(mut starts: Vec<ScheduleEntry>) -> Self {
        starts.sort_by(|a, b| a.start.cmp(&b.start));
        Self { starts }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum OnlineError {
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Behavioral contract for online algorithms: react to announcement
/// batches and to wake-ups (after a finish), returning the full intended
/// plan each time. Decisions may use only jobs announced so far and the
/// algorithm's own history.
pub trait OnlineAlgorithm {
    fn on_announce(&mut self, view: &MachineView, batch: &[Job]) -> Result<Plan, OnlineError>;
    fn on_wake(&mut self, view: &MachineView) -> Result<Plan, OnlineError>;
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent {
    Announce { job: Job },
    Start { job: JobId, start: TimePoint },
    Finish { job: JobId },
    Replan { plan: Vec<ScheduleEntry> },
    Expire { job: JobId },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub time: TimePoint,
    pub event: TraceEvent,
}

/// Timestamped history of one run plus the value it earned.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationTrace {
    pub events: Vec<TraceRecord>,
    pub value: Weight,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SimulationError {
    #[error("plan contract violated{}: {reason}", fmt_job(.job))]
    PlanContract { job: Option<JobId>, reason: String },
    #[error("job {job} announced at a past instant")]
    EmissionInPast { job: JobId },
    #[error("job id {job} announced twice")]
    DuplicateJobId { job: JobId },
    #[error("algorithm failed: {0}")]
    Online(#[from] OnlineError),
    #[error("executed schedule rejected: {0}")]
    Schedule(#[from] ScheduleError),
}

fn fmt_job(job: &Option<JobId>) -> String {
    match job {
        Some(id) => format!(" (job {id})"),
        None => String::new(),
    }
}

/// Feeds jobs into the simulation. `Started` is the only observation an
/// adaptive source receives, so adversaries physically cannot react to
/// anything but the algorithm's commitments.
pub enum Stimulus<'a> {
    /// Simulation begins at time zero.
    Begin,
    /// The algorithm irrevocably started `job` at the given instant.
    Started(&'a Job, &'a TimePoint),
    /// No events remain; the source either emits more or declares the end.
    Quiescent(&'a TimePoint),
}

pub enum SourceStep {
    Emit(Vec<Job>),
    Done,
}

pub trait JobSource {
    fn next(&mut self, stimulus: Stimulus<'_>) -> SourceStep;
}

/// Source that announces a fixed instance.
pub struct StaticSource<'a> {
    instance: &'a Instance,
    emitted: bool,
}

impl<'a> StaticSource<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Self {
            instance,
            emitted: false,
        }
    }
}

impl JobSource for StaticSource<'_> {
    fn next(&mut self, stimulus: Stimulus<'_>) -> SourceStep {
        match stimulus {
            Stimulus::Begin if !self.emitted => {
                self.emitted = true;
                SourceStep::Emit(self.instance.jobs.clone())
            }
            Stimulus::Started(..) => SourceStep::Emit(Vec::new()),
            _ => SourceStep::Done,
        }
    }
}

/// Everything a driver needs after the event loop drains.
pub struct EngineOutcome {
    pub events: Vec<TraceRecord>,
    pub executed: Vec<ScheduleEntry>,
    pub announced: Vec<Job>,
}

struct Engine<'a> {
    algorithm: &'a mut dyn OnlineAlgorithm,
    known: HashMap<JobId, Job>,
    announce_order: Vec<JobId>,
    pending: BTreeMap<TimePoint, Vec<Job>>,
    started: HashSet<JobId>,
    finished: HashSet<JobId>,
    expired: HashSet<JobId>,
    running: Option<RunningJob>,
    plan: Vec<ScheduleEntry>,
    executed: Vec<ScheduleEntry>,
    events: Vec<TraceRecord>,
}

impl<'a> Engine<'a> {
    fn record(&mut self, time: &TimePoint, event: TraceEvent) {
        self.events.push(TraceRecord {
            time: time.clone(),
            event,
        });
    }

    fn absorb_emission(
        &mut self,
        jobs: Vec<Job>,
        now: Option<&TimePoint>,
    ) -> Result<(), SimulationError> {
        for job in jobs {
            if let Some(now) = now {
                if &job.announce < now {
                    return Err(SimulationError::EmissionInPast { job: job.id });
                }
            }
            if self.known.contains_key(&job.id)
                || self
                    .pending
                    .values()
                    .any(|batch| batch.iter().any(|j| j.id == job.id))
            {
                return Err(SimulationError::DuplicateJobId { job: job.id });
            }
            self.pending
                .entry(job.announce.clone())
                .or_default()
                .push(job);
        }
        Ok(())
    }

    fn next_time(&self) -> Option<TimePoint> {
        let mut next: Option<TimePoint> = None;
        let mut consider = |t: &TimePoint| match &next {
            Some(best) if best <= t => {}
            _ => next = Some(t.clone()),
        };
        if let Some(run) = &self.running {
            consider(&run.end);
        }
        if let Some(entry) = self.plan.first() {
            consider(&entry.start);
        }
        if let Some((t, _)) = self.pending.iter().next() {
            consider(t);
        }
        next
    }

    fn accept_plan(&mut self, plan: Plan, now: &TimePoint) -> Result<(), SimulationError> {
        let mut starts = plan.starts;
        starts.sort_by(|a, b| a.start.cmp(&b.start));
        let mut seen = HashSet::new();
        for (i, entry) in starts.iter().enumerate() {
            let fail = |reason: String| SimulationError::PlanContract {
                job: Some(entry.job),
                reason,
            };
            let job = self
                .known
                .get(&entry.job)
                .ok_or_else(|| fail("job not announced yet".into()))?;
            debug_assert!(job.announce <= *now, "causality");
            if self.started.contains(&entry.job) || self.finished.contains(&entry.job) {
                return Err(fail("job already started".into()));
            }
            if !seen.insert(entry.job) {
                return Err(fail("job planned twice".into()));
            }
            if entry.start < *now {
                return Err(fail(format!("start {} is in the past", entry.start)));
            }
            if entry.start < job.release {
                return Err(fail(format!("start {} precedes release", entry.start)));
            }
            let end = job.end_for_start(&entry.start);
            if end > job.deadline {
                return Err(fail(format!("end {end} misses the deadline")));
            }
            if let Some(run) = &self.running {
                if entry.start < run.end {
                    return Err(fail(format!(
                        "start {} lands inside the running job",
                        entry.start
                    )));
                }
            }
            if i + 1 < starts.len() && end > starts[i + 1].start {
                return Err(fail("planned intervals overlap".into()));
            }
        }
        self.plan = starts;
        Ok(())
    }

    fn run(&mut self, source: &mut dyn JobSource) -> Result<(), SimulationError> {
        if let SourceStep::Emit(jobs) = source.next(Stimulus::Begin) {
            self.absorb_emission(jobs, None)?;
        }
        let mut source_done = false;
        let mut last_time = TimePoint::zero();

        loop {
            let now = match self.next_time() {
                Some(t) => t,
                None => {
                    if source_done {
                        break;
                    }
                    match source.next(Stimulus::Quiescent(&last_time)) {
                        SourceStep::Emit(jobs) if !jobs.is_empty() => {
                            self.absorb_emission(jobs, Some(&last_time))?;
                            continue;
                        }
                        _ => break,
                    }
                }
            };
            last_time = now.clone();

            // 1. finish
            let mut woke = false;
            if let Some(run) = &self.running {
                if run.end == now {
                    let id = run.job;
                    self.finished.insert(id);
                    self.running = None;
                    self.record(&now, TraceEvent::Finish { job: id });
                    woke = true;
                }
            }

            // 2. expire jobs that can no longer start
            let expired_now: Vec<JobId> = self
                .announce_order
                .iter()
                .copied()
                .filter(|id| {
                    if self.started.contains(id) || self.expired.contains(id) {
                        return false;
                    }
                    let job = &self.known[id];
                    let earliest_end = &now + &job.processing;
                    earliest_end > job.deadline
                })
                .collect();
            for id in expired_now {
                self.expired.insert(id);
                self.record(&now, TraceEvent::Expire { job: id });
            }

            // 3. execute a due planned start
            if self
                .plan
                .first()
                .is_some_and(|entry| entry.start == now)
            {
                let entry = self.plan.remove(0);
                if self.running.is_some() {
                    return Err(SimulationError::PlanContract {
                        job: Some(entry.job),
                        reason: "start due while the machine is busy".into(),
                    });
                }
                let job = self.known[&entry.job].clone();
                self.started.insert(entry.job);
                self.running = Some(RunningJob {
                    job: entry.job,
                    end: job.end_for_start(&entry.start),
                });
                self.executed.push(entry.clone());
                self.record(
                    &now,
                    TraceEvent::Start {
                        job: entry.job,
                        start: entry.start.clone(),
                    },
                );
                if !source_done {
                    match source.next(Stimulus::Started(&job, &now)) {
                        SourceStep::Emit(jobs) => self.absorb_emission(jobs, Some(&now))?,
                        SourceStep::Done => source_done = true,
                    }
                }
            }

            // 4. deliver announcements as one batch, then replan
            if let Some(batch) = self.pending.remove(&now) {
                for job in &batch {
                    self.known.insert(job.id, job.clone());
                    self.announce_order.push(job.id);
                    self.record(&now, TraceEvent::Announce { job: job.clone() });
                }
                let view = MachineView {
                    now: now.clone(),
                    running: self.running.clone(),
                };
                let plan = self.algorithm.on_announce(&view, &batch)?;
                self.accept_plan(plan, &now)?;
                self.record(
                    &now,
                    TraceEvent::Replan {
                        plan: self.plan.clone(),
                    },
                );
            } else if woke {
                let view = MachineView {
                    now: now.clone(),
                    running: self.running.clone(),
                };
                let plan = self.algorithm.on_wake(&view)?;
                let changed = plan.starts != self.plan;
                self.accept_plan(plan, &now)?;
                if changed {
                    self.record(
                        &now,
                        TraceEvent::Replan {
                            plan: self.plan.clone(),
                        },
                    );
                }
            }
        }
        Ok(())
    }
}

/// Runs the algorithm against an arbitrary job source and returns the raw
/// outcome; values are computed by the callers who know the weight model.
pub fn drive(
    source: &mut dyn JobSource,
    algorithm: &mut dyn OnlineAlgorithm,
) -> Result<EngineOutcome, SimulationError> {
    let mut engine = Engine {
        algorithm,
        known: HashMap::new(),
        announce_order: Vec::new(),
        pending: BTreeMap::new(),
        started: HashSet::new(),
        finished: HashSet::new(),
        expired: HashSet::new(),
        running: None,
        plan: Vec::new(),
        executed: Vec::new(),
        events: Vec::new(),
    };
    engine.run(source)?;
    let mut announced: Vec<Job> = Vec::with_capacity(engine.announce_order.len());
    for id in &engine.announce_order {
        announced.push(engine.known[id].clone());
    }
    Ok(EngineOutcome {
        events: engine.events,
        executed: engine.executed,
        announced,
    })
}

/// Simulates a fixed instance under the given algorithm.
pub fn simulate(
    instance: &Instance,
    algorithm: &mut dyn OnlineAlgorithm,
) -> Result<(SimulationTrace, Schedule), SimulationError> {
    let mut source = StaticSource::new(instance);
    let outcome = drive(&mut source, algorithm)?;
    let value = schedule_value(instance, &outcome.executed)?;
    let schedule = Schedule {
        entries: outcome.executed,
        value: value.clone(),
    };
    let trace = SimulationTrace {
        events: outcome.events,
        value,
    };
    Ok((trace, schedule))
}

/// The replanning step shared by the online algorithm and its tests:
/// clip every release to `L = max(now, busy_until)`, drop jobs that no
/// longer fit, and solve the rest exactly. The returned plan holds the
/// solver's start assignments.
pub fn compute_replan(
    pool: &[Job],
    now: &TimePoint,
    busy_until: &TimePoint,
    weights: &WeightModel,
    config: &SolverConfig,
) -> Result<(Plan, SolverStats), SolverError> {
    let cutoff = now.clone().max(busy_until.clone());
    let mut clipped = Vec::new();
    for job in pool {
        let release = job.release.clone().max(cutoff.clone());
        let end = &release + &job.processing;
        if end > job.deadline {
            continue;
        }
        clipped.push(Job::new(
            job.id,
            job.announce.clone(),
            release,
            job.processing.clone(),
            job.deadline.clone(),
        ));
    }
    let sub = Instance::new(clipped, Rat::from_integer(0.into()), weights.clone());
    let (schedule, stats) = optimal_offline_with(&sub, config)?;
    Ok((Plan::new(schedule.entries), stats))
}

/// Online algorithm that reruns the exact offline solver on all known,
/// not-yet-started jobs at every announcement and follows the resulting
/// plan verbatim in between.
pub struct ReplanScheduler {
    weights: WeightModel,
    config: SolverConfig,
    known: Vec<Job>,
    committed: HashSet<JobId>,
    plan: Vec<ScheduleEntry>,
    pub solver_nodes: u64,
}

impl ReplanScheduler {
    pub fn new(weights: WeightModel) -> Self {
        Self::with_config(weights, SolverConfig::default())
    }

    pub fn with_config(weights: WeightModel, config: SolverConfig) -> Self {
        Self {
            weights,
            config,
            known: Vec::new(),
            committed: HashSet::new(),
            plan: Vec::new(),
            solver_nodes: 0,
        }
    }

    /// Planned starts at or before `now` have been executed by the machine;
    /// they are commitments and leave the replanning pool forever.
    fn absorb_commitments(&mut self, now: &TimePoint) {
        for entry in &self.plan {
            if &entry.start <= now {
                self.committed.insert(entry.job);
            }
        }
    }

    fn remaining_plan(&self) -> Plan {
        Plan::new(
            self.plan
                .iter()
                .filter(|e| !self.committed.contains(&e.job))
                .cloned()
                .collect(),
        )
    }
}

impl OnlineAlgorithm for ReplanScheduler {
    fn on_announce(&mut self, view: &MachineView, batch: &[Job]) -> Result<Plan, OnlineError> {
        self.absorb_commitments(&view.now);
        self.known.extend(batch.iter().cloned());
        let pool: Vec<Job> = self
            .known
            .iter()
            .filter(|j| !self.committed.contains(&j.id))
            .cloned()
            .collect();
        let busy_until = view
            .running
            .as_ref()
            .map(|r| r.end.clone())
            .unwrap_or_else(|| view.now.clone());
        let (plan, stats) =
            compute_replan(&pool, &view.now, &busy_until, &self.weights, &self.config)
                .map_err(OnlineError::Solver)?;
        self.solver_nodes += stats.nodes;
        self.plan = plan.starts.clone();
        Ok(plan)
    }

    fn on_wake(&mut self, view: &MachineView) -> Result<Plan, OnlineError> {
        self.absorb_commitments(&view.now);
        Ok(self.remaining_plan())
    }
}

/// Baseline: whenever idle, start the highest-weight currently feasible
/// announced job, ties broken by id. Plans one start at a time.
pub struct GreedyScheduler {
    weights: WeightModel,
    known: Vec<Job>,
    committed: HashSet<JobId>,
    plan: Vec<ScheduleEntry>,
}

impl GreedyScheduler {
    pub fn new(weights: WeightModel) -> Self {
        Self {
            weights,
            known: Vec::new(),
            committed: HashSet::new(),
            plan: Vec::new(),
        }
    }

    fn absorb_commitments(&mut self, now: &TimePoint) {
        for entry in &self.plan {
            if &entry.start <= now {
                self.committed.insert(entry.job);
            }
        }
    }

    fn decide(&mut self, view: &MachineView) -> Plan {
        if view.running.is_some() {
            self.plan = Vec::new();
            return Plan::empty();
        }
        // earliest instant anything can start, then best weight, then id
        let mut pick: Option<(TimePoint, Weight, JobId)> = None;
        for job in &self.known {
            if self.committed.contains(&job.id) {
                continue;
            }
            let start = view.now.clone().max(job.release.clone());
            if job.end_for_start(&start) > job.deadline {
                continue;
            }
            let weight = match weight_of(&self.weights, &job.processing) {
                Ok(w) => w,
                Err(_) => continue,
            };
            let better = match &pick {
                None => true,
                Some((s, w, id)) => {
                    start < *s
                        || (start == *s
                            && (weight > *w || (weight == *w && job.id < *id)))
                }
            };
            if better {
                pick = Some((start, weight, job.id));
            }
        }
        match pick {
            Some((start, _, id)) => {
                let plan = Plan::new(vec![ScheduleEntry::new(id, start)]);
                self.plan = plan.starts.clone();
                plan
            }
            None => {
                self.plan = Vec::new();
                Plan::empty()
            }
        }
    }
}

impl OnlineAlgorithm for GreedyScheduler {
    fn on_announce(&mut self, view: &MachineView, batch: &[Job]) -> Result<Plan, OnlineError> {
        self.absorb_commitments(&view.now);
        self.known.extend(batch.iter().cloned());
        Ok(self.decide(view))
    }

    fn on_wake(&mut self, view: &MachineView) -> Result<Plan, OnlineError> {
        self.absorb_commitments(&view.now);
        Ok(self.decide(view))
    }
}

/// Runs the replan-on-announcement algorithm on an instance.
pub fn run_replan(instance: &Instance) -> Result<(SimulationTrace, Schedule), SimulationError> {
    run_replan_with(instance, &SolverConfig::default())
}

pub fn run_replan_with(
    instance: &Instance,
    config: &SolverConfig,
) -> Result<(SimulationTrace, Schedule), SimulationError> {
    let mut algorithm = ReplanScheduler::with_config(instance.weights.clone(), config.clone());
    simulate(instance, &mut algorithm)
}

/// Runs the greedy baseline on an instance.
pub fn run_greedy(instance: &Instance) -> Result<(SimulationTrace, Schedule), SimulationError> {
    let mut algorithm = GreedyScheduler::new(instance.weights.clone());
    simulate(instance, &mut algorithm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json::trace_to_jsonl;
    use crate::time::rat;

    fn tp(n: i64, d: i64) -> TimePoint {
        TimePoint::ratio(n, d).unwrap()
    }

    fn job(id: u32, a: (i64, i64), r: (i64, i64), p: (i64, i64), d: (i64, i64)) -> Job {
        Job::new(
            JobId(id),
            tp(a.0, a.1),
            tp(r.0, r.1),
            tp(p.0, p.1),
            tp(d.0, d.1),
        )
    }

    fn proportional(jobs: Vec<Job>, notice: (i64, i64)) -> Instance {
        Instance::new(jobs, rat(notice.0, notice.1), WeightModel::Proportional)
    }

    #[test]
    fn empty_instance_empty_trace() {
        let inst = proportional(vec![], (1, 1));
        let (trace, sched) = run_replan(&inst).unwrap();
        assert!(trace.events.is_empty());
        assert!(sched.entries.is_empty());
        assert!(trace.value.is_zero());
    }

    #[test]
    fn single_job_runs_in_its_window() {
        let inst = proportional(vec![job(0, (0, 1), (1, 1), (1, 1), (2, 1))], (1, 1));
        let (trace, sched) = run_replan(&inst).unwrap();
        assert_eq!(sched.entries, vec![ScheduleEntry::new(JobId(0), tp(1, 1))]);
        assert_eq!(trace.value, Weight::Exact(rat(1, 1)));
        let kinds: Vec<&TraceEvent> = trace.events.iter().map(|r| &r.event).collect();
        assert!(matches!(kinds[0], TraceEvent::Announce { .. }));
        assert!(matches!(kinds[1], TraceEvent::Replan { .. }));
        assert!(matches!(kinds[2], TraceEvent::Start { .. }));
        assert!(matches!(kinds[3], TraceEvent::Finish { .. }));
    }

    #[test]
    fn single_job_trace_bytes_are_frozen() {
        let inst = proportional(vec![job(0, (0, 1), (1, 1), (1, 1), (2, 1))], (1, 1));
        let (trace, _) = run_replan(&inst).unwrap();
        let expected = concat!(
            r#"{"time":{"num":0,"den":1},"kind":"announce","job":{"id":0,"a":{"num":0,"den":1},"r":{"num":1,"den":1},"p":{"num":1,"den":1},"d":{"num":2,"den":1}}}"#,
            "\n",
            r#"{"time":{"num":0,"den":1},"kind":"replan","plan":[{"job":0,"start":{"num":1,"den":1}}]}"#,
            "\n",
            r#"{"time":{"num":1,"den":1},"kind":"start","job":0,"start":{"num":1,"den":1}}"#,
            "\n",
            r#"{"time":{"num":2,"den":1},"kind":"finish","job":0}"#,
            "\n",
        );
        assert_eq!(trace_to_jsonl(&trace).unwrap(), expected);
    }

    #[test]
    fn traces_are_deterministic() {
        let inst = proportional(
            vec![
                job(0, (0, 1), (1, 2), (1, 2), (3, 1)),
                job(1, (0, 1), (1, 1), (1, 1), (4, 1)),
                job(2, (3, 2), (2, 1), (1, 2), (3, 1)),
            ],
            (1, 2),
        );
        let (a, _) = run_replan(&inst).unwrap();
        let (b, _) = run_replan(&inst).unwrap();
        assert_eq!(trace_to_jsonl(&a).unwrap(), trace_to_jsonl(&b).unwrap());
    }

    #[test]
    fn replan_clips_release_to_busy_until() {
        let pool = vec![job(7, (0, 1), (3, 1), (2, 1), (10, 1))];
        let (plan, _) = compute_replan(
            &pool,
            &tp(4, 1),
            &tp(5, 1),
            &WeightModel::Proportional,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(plan.starts, vec![ScheduleEntry::new(JobId(7), tp(5, 1))]);
    }

    #[test]
    fn replan_solves_both_orders() {
        let pool = vec![
            job(0, (0, 1), (0, 1), (2, 1), (2, 1)),
            job(1, (0, 1), (0, 1), (1, 1), (4, 1)),
        ];
        let (plan, _) = compute_replan(
            &pool,
            &TimePoint::zero(),
            &TimePoint::zero(),
            &WeightModel::Proportional,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(
            plan.starts,
            vec![
                ScheduleEntry::new(JobId(0), tp(0, 1)),
                ScheduleEntry::new(JobId(1), tp(2, 1)),
            ]
        );
    }

    #[test]
    fn empty_pool_gives_empty_plan() {
        let (plan, _) = compute_replan(
            &[],
            &TimePoint::zero(),
            &TimePoint::zero(),
            &WeightModel::Proportional,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(plan.starts.is_empty());
    }

    #[test]
    fn greedy_takes_the_heavier_job_first() {
        // both released at 0 with tight windows; greedy grabs p=2
        let inst = proportional(
            vec![
                job(0, (0, 1), (0, 1), (1, 1), (1, 1)),
                job(1, (0, 1), (0, 1), (2, 1), (2, 1)),
            ],
            (0, 1),
        );
        let (_, sched) = run_greedy(&inst).unwrap();
        assert_eq!(sched.entries, vec![ScheduleEntry::new(JobId(1), tp(0, 1))]);
        assert_eq!(sched.value, Weight::Exact(rat(2, 1)));
    }

    #[test]
    fn greedy_waits_for_releases() {
        let inst = proportional(vec![job(0, (0, 1), (2, 1), (1, 1), (4, 1))], (2, 1));
        let (_, sched) = run_greedy(&inst).unwrap();
        assert_eq!(sched.entries, vec![ScheduleEntry::new(JobId(0), tp(2, 1))]);
    }

    #[test]
    fn late_announcement_triggers_replanning() {
        // the second job arrives while the first is running and cannot fit
        let inst = proportional(
            vec![
                job(0, (0, 1), (0, 1), (2, 1), (2, 1)),
                job(1, (1, 2), (1, 1), (1, 1), (2, 1)),
            ],
            (0, 1),
        );
        let (trace, sched) = run_replan(&inst).unwrap();
        assert_eq!(sched.job_ids(), vec![JobId(0)]);
        assert!(trace
            .events
            .iter()
            .any(|r| matches!(r.event, TraceEvent::Expire { job: JobId(1) })));
    }

    #[test]
    fn greedy_on_an_empty_instance_earns_nothing() {
        let inst = proportional(vec![], (1, 1));
        let (trace, sched) = run_greedy(&inst).unwrap();
        assert!(trace.events.is_empty());
        assert!(sched.value.is_zero());
    }

    #[test]
    fn same_instant_order_is_finish_start_announce() {
        // at time 1: job 0 finishes, planned job 1 starts, job 2 arrives
        let inst = proportional(
            vec![
                job(0, (0, 1), (0, 1), (1, 1), (1, 1)),
                job(1, (0, 1), (1, 1), (1, 1), (2, 1)),
                job(2, (1, 1), (2, 1), (1, 1), (3, 1)),
            ],
            (0, 1),
        );
        let (trace, sched) = run_replan(&inst).unwrap();
        let at_one: Vec<&TraceEvent> = trace
            .events
            .iter()
            .filter(|r| r.time == tp(1, 1))
            .map(|r| &r.event)
            .collect();
        assert!(matches!(at_one[0], TraceEvent::Finish { job: JobId(0) }));
        assert!(matches!(at_one[1], TraceEvent::Start { job: JobId(1), .. }));
        assert!(matches!(at_one[2], TraceEvent::Announce { .. }));
        assert!(matches!(at_one[3], TraceEvent::Replan { .. }));
        // the late job still fits after the running one
        assert_eq!(sched.value, Weight::Exact(rat(3, 1)));
    }

    #[test]
    fn rogue_plans_are_rejected() {
        struct Rogue;
        impl OnlineAlgorithm for Rogue {
            fn on_announce(
                &mut self,
                view: &MachineView,
                batch: &[Job],
            ) -> Result<Plan, OnlineError> {
                // plans a start before the release
                let job = &batch[0];
                let _ = view;
                Ok(Plan::new(vec![ScheduleEntry::new(job.id, TimePoint::zero())]))
            }
            fn on_wake(&mut self, _view: &MachineView) -> Result<Plan, OnlineError> {
                Ok(Plan::empty())
            }
        }
        let inst = proportional(vec![job(0, (0, 1), (1, 1), (1, 1), (2, 1))], (1, 1));
        let err = simulate(&inst, &mut Rogue).unwrap_err();
        assert!(matches!(err, SimulationError::PlanContract { .. }), "{err}");
    }

    #[test]
    fn online_never_beats_offline() {
        use crate::solver::optimal_offline;
        let inst = proportional(
            vec![
                job(0, (0, 1), (0, 1), (2, 1), (3, 1)),
                job(1, (1, 2), (1, 1), (3, 2), (4, 1)),
                job(2, (1, 1), (3, 2), (1, 1), (3, 1)),
            ],
            (1, 2),
        );
        let (_, online) = run_replan(&inst).unwrap();
        let (offline, _) = optimal_offline(&inst);
        assert!(online.value <= offline.value);
    }
}
