//! Property tests for the structural invariants.

use proptest::prelude::*;

use sched_core::generator::{random_instance, GeneratorParams};
use sched_core::json::{instance_from_json, instance_to_json, trace_to_jsonl};
use sched_core::solver::{brute_force_opt, optimal_offline};
use sched_core::time::rat;
use sched_core::{
    competitive_bound, run_replan, schedule_value, validate_instance, Instance, Job, JobId,
    TimePoint, Weight, WeightModel,
};

fn tp(n: i64, d: i64) -> TimePoint {
    TimePoint::ratio(n, d).unwrap()
}

/// A feasible job with small rational coordinates and zero announce lead
/// beyond what the window forces.
fn job_strategy(id: u32) -> impl Strategy<Value = Job> {
    (
        0i64..40,  // release numerator
        1i64..5,   // denominator shared by all coordinates
        1i64..12,  // processing numerator
        0i64..10,  // slack numerator
        0i64..6,   // announce lead numerator
    )
        .prop_map(move |(r, den, p, slack, lead)| {
            let release = tp(r, den);
            let processing = tp(p, den);
            let deadline = tp(r + p + slack, den);
            let announce = tp((r - lead).max(0), den);
            Job::new(JobId(id), announce, release, processing, deadline)
        })
}

fn instance_strategy(max_jobs: usize) -> impl Strategy<Value = Instance> {
    prop::collection::vec(0u32..1, 0..=max_jobs).prop_flat_map(move |slots| {
        let jobs: Vec<_> = (0..slots.len() as u32).map(job_strategy).collect();
        jobs.prop_map(|mut jobs| {
            jobs.sort_by(|a, b| a.announce.cmp(&b.announce));
            for (i, job) in jobs.iter_mut().enumerate() {
                job.id = JobId(i as u32);
            }
            Instance::new(jobs, rat(0, 1), WeightModel::Proportional)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_json_round_trips(inst in instance_strategy(6)) {
        let text = instance_to_json(&inst).unwrap();
        let back = instance_from_json(&text).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn generated_instances_always_validate(
        seed in any::<u64>(),
        n in 0usize..12,
        t_num in 0i64..4,
    ) {
        let notice = rat(t_num, 2);
        let params = GeneratorParams::standard(n, notice.clone(), WeightModel::Proportional);
        let inst = random_instance(&params, seed).unwrap();
        prop_assert!(validate_instance(&inst).is_empty());
        for job in &inst.jobs {
            let lead = job.release.as_rat() - job.announce.as_rat();
            prop_assert_eq!(lead, &notice * job.processing.as_rat());
        }
    }

    #[test]
    fn value_is_additive_over_entry_splits(inst in instance_strategy(5), cut in 0usize..6) {
        let (schedule, _) = optimal_offline(&inst);
        let cut = cut.min(schedule.entries.len());
        let (left, right) = schedule.entries.split_at(cut);
        let total = schedule_value(&inst, &schedule.entries).unwrap();
        let left_v = schedule_value(&inst, left).unwrap();
        let right_v = schedule_value(&inst, right).unwrap();
        prop_assert_eq!(total, left_v.add(&right_v));
    }

    #[test]
    fn solver_matches_the_exhaustive_oracle(inst in instance_strategy(5)) {
        let oracle = brute_force_opt(&inst).unwrap();
        let (solved, _) = optimal_offline(&inst);
        prop_assert_eq!(solved.value.clone(), oracle.value.clone());
        prop_assert_eq!(solved.job_ids(), oracle.job_ids());
        prop_assert_eq!(solved.entries, oracle.entries);
    }

    #[test]
    fn optimum_is_monotone_under_job_addition(inst in instance_strategy(4), extra in job_strategy(99)) {
        let (small, _) = optimal_offline(&inst);
        let mut bigger = inst.clone();
        bigger.jobs.push(extra);
        let (large, _) = optimal_offline(&bigger);
        prop_assert!(large.value >= small.value);
    }

    #[test]
    fn online_stays_between_bound_and_optimum(
        seed in any::<u64>(),
        n in 0usize..8,
        t_idx in 0usize..3,
    ) {
        let notice = [rat(1, 4), rat(1, 2), rat(1, 1)][t_idx].clone();
        let params = GeneratorParams::standard(n, notice.clone(), WeightModel::Proportional);
        let inst = random_instance(&params, seed).unwrap();
        let (_, online) = run_replan(&inst).unwrap();
        let (offline, _) = optimal_offline(&inst);
        prop_assert!(online.value <= offline.value);
        let alg = online.value.as_exact().unwrap();
        let opt = offline.value.as_exact().unwrap();
        // alg >= t/(2t+1) * opt, cross-multiplied exactly
        prop_assert!(alg >= &(competitive_bound(&notice) * opt));
    }

    #[test]
    fn scaling_preserves_selection_and_scales_value(
        seed in any::<u64>(),
        n in 0usize..6,
    ) {
        let params = GeneratorParams::standard(n, rat(1, 2), WeightModel::Proportional);
        let inst = random_instance(&params, seed).unwrap();
        let factor = rat(3, 7);
        let scaled = inst.scaled(&factor).unwrap();

        let (_, plain) = run_replan(&inst).unwrap();
        let (_, shrunk) = run_replan(&scaled).unwrap();
        let plain_seq: Vec<JobId> = plain.entries.iter().map(|e| e.job).collect();
        let shrunk_seq: Vec<JobId> = shrunk.entries.iter().map(|e| e.job).collect();
        prop_assert_eq!(plain_seq, shrunk_seq);
        let expect = Weight::Exact(plain.value.as_exact().unwrap() * &factor);
        prop_assert_eq!(shrunk.value, expect);
    }

    #[test]
    fn power_curves_stay_benevolent_for_any_exponent_at_least_one(
        k_tenths in 10u32..200,
        grid_seed in 0u32..1000,
    ) {
        use sched_core::weight::CurveTriple;
        let exponent = f64::from(k_tenths) / 10.0;
        // a small deterministic grid of valid triples derived from the seed
        let mut grid = Vec::new();
        for i in 0..8u32 {
            let a = 1 + i64::from((grid_seed + i) % 13);
            let b = a + i64::from((grid_seed + 3 * i) % 9);
            grid.push(CurveTriple {
                p1: rat(a, 4),
                p2: rat(b, 4),
                eps: rat(a, 8),
            });
        }
        let violations = sched_core::check_c_benevolent(
            &WeightModel::PowerBenevolent { exponent },
            &grid,
        )
        .unwrap();
        prop_assert!(violations.is_empty(), "k={exponent}: {violations:?}");
    }

    #[test]
    fn identical_runs_serialize_identically(seed in any::<u64>(), n in 0usize..8) {
        let params = GeneratorParams::standard(n, rat(1, 2), WeightModel::Proportional);
        let inst = random_instance(&params, seed).unwrap();
        let (a, _) = run_replan(&inst).unwrap();
        let (b, _) = run_replan(&inst).unwrap();
        prop_assert_eq!(trace_to_jsonl(&a).unwrap(), trace_to_jsonl(&b).unwrap());
    }
}
