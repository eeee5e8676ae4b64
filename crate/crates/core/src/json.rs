//! JSON serialization of instances, schedules and traces.
//!
//! Rationals travel as `{"num": N, "den": D}` integer pairs. Inputs need not
//! be in lowest terms; outputs always are. Components must fit in an `i128`,
//! which leaves many orders of magnitude of headroom over anything this
//! workbench produces.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::job::{Job, JobId};
use crate::schedule::{Schedule, ScheduleEntry};
use crate::sim::{SimulationTrace, TraceEvent};
use crate::time::{Rat, TimePoint};
use crate::weight::{Weight, WeightModel};

#[derive(Debug, Clone, thiserror::Error)]
pub enum JsonError {
    #[error("json: {0}")]
    Syntax(String),
    #[error("rational component exceeds the i128 transport range")]
    OutOfRange,
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("negative time value {0}")]
    NegativeTime(String),
}

#[derive(Serialize, Deserialize)]
struct RatDto {
    num: i128,
    den: i128,
}

fn rat_to_dto(r: &Rat) -> Result<RatDto, JsonError> {
    let num = r.numer().to_i128().ok_or(JsonError::OutOfRange)?;
    let den = r.denom().to_i128().ok_or(JsonError::OutOfRange)?;
    Ok(RatDto { num, den })
}

fn dto_to_rat(dto: &RatDto) -> Result<Rat, JsonError> {
    if dto.den == 0 {
        return Err(JsonError::ZeroDenominator);
    }
    Ok(Rat::new(BigInt::from(dto.num), BigInt::from(dto.den)))
}

fn time_to_dto(t: &TimePoint) -> Result<RatDto, JsonError> {
    rat_to_dto(t.as_rat())
}

fn dto_to_time(dto: &RatDto) -> Result<TimePoint, JsonError> {
    let r = dto_to_rat(dto)?;
    if r.is_negative() {
        return Err(JsonError::NegativeTime(r.to_string()));
    }
    Ok(TimePoint::new(r).expect("nonnegative"))
}

#[derive(Serialize, Deserialize)]
struct JobDto {
    id: u32,
    a: RatDto,
    r: RatDto,
    p: RatDto,
    d: RatDto,
}

#[derive(Serialize, Deserialize)]
struct PowerDto {
    k: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum WeightsDto {
    Proportional,
    Unweighted,
    Power(PowerDto),
}

#[derive(Serialize, Deserialize)]
struct InstanceDto {
    t: RatDto,
    weights: WeightsDto,
    jobs: Vec<JobDto>,
}

fn job_to_dto(job: &Job) -> Result<JobDto, JsonError> {
    Ok(JobDto {
        id: job.id.0,
        a: time_to_dto(&job.announce)?,
        r: time_to_dto(&job.release)?,
        p: time_to_dto(&job.processing)?,
        d: time_to_dto(&job.deadline)?,
    })
}

fn dto_to_job(dto: &JobDto) -> Result<Job, JsonError> {
    Ok(Job::new(
        JobId(dto.id),
        dto_to_time(&dto.a)?,
        dto_to_time(&dto.r)?,
        dto_to_time(&dto.p)?,
        dto_to_time(&dto.d)?,
    ))
}

pub fn instance_to_json(instance: &Instance) -> Result<String, JsonError> {
    let weights = match &instance.weights {
        WeightModel::Proportional => WeightsDto::Proportional,
        WeightModel::Unweighted => WeightsDto::Unweighted,
        WeightModel::PowerBenevolent { exponent } => WeightsDto::Power(PowerDto { k: *exponent }),
    };
    let dto = InstanceDto {
        t: rat_to_dto(&instance.notice)?,
        weights,
        jobs: instance
            .jobs
            .iter()
            .map(job_to_dto)
            .collect::<Result<_, _>>()?,
    };
    serde_json::to_string(&dto).map_err(|e| JsonError::Syntax(e.to_string()))
}

pub fn instance_from_json(text: &str) -> Result<Instance, JsonError> {
    let dto: InstanceDto =
        serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))?;
    let weights = match dto.weights {
        WeightsDto::Proportional => WeightModel::Proportional,
        WeightsDto::Unweighted => WeightModel::Unweighted,
        WeightsDto::Power(p) => WeightModel::PowerBenevolent { exponent: p.k },
    };
    let notice = dto_to_rat(&dto.t)?;
    let jobs = dto
        .jobs
        .iter()
        .map(dto_to_job)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Instance::new(jobs, notice, weights))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum WeightDto {
    Exact(RatDto),
    Approx(f64),
}

#[derive(Serialize, Deserialize)]
struct EntryDto {
    job: u32,
    start: RatDto,
}

#[derive(Serialize, Deserialize)]
struct ScheduleDto {
    value: WeightDto,
    entries: Vec<EntryDto>,
}

fn entry_to_dto(entry: &ScheduleEntry) -> Result<EntryDto, JsonError> {
    Ok(EntryDto {
        job: entry.job.0,
        start: time_to_dto(&entry.start)?,
    })
}

fn dto_to_entry(dto: &EntryDto) -> Result<ScheduleEntry, JsonError> {
    Ok(ScheduleEntry::new(JobId(dto.job), dto_to_time(&dto.start)?))
}

pub fn schedule_to_json(schedule: &Schedule) -> Result<String, JsonError> {
    let value = match &schedule.value {
        Weight::Exact(r) => WeightDto::Exact(rat_to_dto(r)?),
        Weight::Approx(x) => WeightDto::Approx(*x),
    };
    let dto = ScheduleDto {
        value,
        entries: schedule
            .entries
            .iter()
            .map(entry_to_dto)
            .collect::<Result<_, _>>()?,
    };
    serde_json::to_string(&dto).map_err(|e| JsonError::Syntax(e.to_string()))
}

pub fn schedule_from_json(text: &str) -> Result<Schedule, JsonError> {
    let dto: ScheduleDto =
        serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))?;
    let value = match dto.value {
        WeightDto::Exact(r) => {
            let r = dto_to_rat(&r)?;
            Weight::Exact(r)
        }
        WeightDto::Approx(x) => Weight::Approx(x),
    };
    let entries = dto
        .entries
        .iter()
        .map(dto_to_entry)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Schedule { entries, value })
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum EventDto {
    Announce { job: JobDto },
    Start { job: u32, start: RatDto },
    Finish { job: u32 },
    Replan { plan: Vec<EntryDto> },
    Expire { job: u32 },
}

#[derive(Serialize)]
struct TraceLineDto {
    time: RatDto,
    #[serde(flatten)]
    event: EventDto,
}

/// One event per line, times as num/den pairs, stable field order. The
/// output is byte-for-byte deterministic for a given trace.
pub fn trace_to_jsonl(trace: &SimulationTrace) -> Result<String, JsonError> {
    let mut out = String::new();
    for record in &trace.events {
        let event = match &record.event {
            TraceEvent::Announce { job } => EventDto::Announce {
                job: job_to_dto(job)?,
            },
            TraceEvent::Start { job, start } => EventDto::Start {
                job: job.0,
                start: time_to_dto(start)?,
            },
            TraceEvent::Finish { job } => EventDto::Finish { job: job.0 },
            TraceEvent::Replan { plan } => EventDto::Replan {
                plan: plan
                    .iter()
                    .map(entry_to_dto)
                    .collect::<Result<_, _>>()?,
            },
            TraceEvent::Expire { job } => EventDto::Expire { job: job.0 },
        };
        let line = TraceLineDto {
            time: time_to_dto(&record.time)?,
            event,
        };
        out.push_str(
            &serde_json::to_string(&line).map_err(|e| JsonError::Syntax(e.to_string()))?,
        );
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::rat;

    #[test]
    fn parses_the_documented_instance_format() {
        let text = r#"{"t":{"num":1,"den":2},"weights":"proportional",
                       "jobs":[{"id":0,"a":{"num":0,"den":1},"r":{"num":2,"den":4},
                                "p":{"num":1,"den":1},"d":{"num":3,"den":1}}]}"#;
        let inst = instance_from_json(text).unwrap();
        assert_eq!(inst.notice, rat(1, 2));
        assert_eq!(inst.weights, WeightModel::Proportional);
        assert_eq!(inst.jobs.len(), 1);
        // 2/4 normalized to 1/2
        assert_eq!(inst.jobs[0].release, TimePoint::ratio(1, 2).unwrap());

        let out = instance_to_json(&inst).unwrap();
        assert!(out.contains(r#""r":{"num":1,"den":2}"#), "{out}");
    }

    #[test]
    fn power_weights_round_trip() {
        let inst = Instance::empty(rat(1, 1), WeightModel::PowerBenevolent { exponent: 2.5 });
        let text = instance_to_json(&inst).unwrap();
        assert!(text.contains(r#""weights":{"power":{"k":2.5}}"#), "{text}");
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back.weights, inst.weights);
    }

    #[test]
    fn unweighted_is_a_bare_string() {
        let inst = Instance::empty(rat(1, 1), WeightModel::Unweighted);
        let text = instance_to_json(&inst).unwrap();
        assert!(text.contains(r#""weights":"unweighted""#), "{text}");
    }

    #[test]
    fn schedule_round_trip() {
        let sched = Schedule {
            entries: vec![ScheduleEntry::new(JobId(4), TimePoint::ratio(7, 3).unwrap())],
            value: Weight::Exact(rat(5, 2)),
        };
        let text = schedule_to_json(&sched).unwrap();
        let back = schedule_from_json(&text).unwrap();
        assert_eq!(back, sched);
    }

    #[test]
    fn zero_denominator_is_rejected() {
        let text = r#"{"t":{"num":1,"den":0},"weights":"unweighted","jobs":[]}"#;
        assert!(matches!(
            instance_from_json(text),
            Err(JsonError::ZeroDenominator)
        ));
    }

    #[test]
    fn negative_times_are_rejected() {
        let text = r#"{"t":{"num":1,"den":1},"weights":"unweighted",
                       "jobs":[{"id":0,"a":{"num":-1,"den":1},"r":{"num":0,"den":1},
                                "p":{"num":1,"den":1},"d":{"num":2,"den":1}}]}"#;
        assert!(matches!(
            instance_from_json(text),
            Err(JsonError::NegativeTime(_))
        ));
    }
}
