use std::fs;

use sched_core::adversary::{
    run_against_adversary, Adversary, AdversaryError, AdversaryOutcome, CBenevolentAdversary,
    ProportionalLbAdversary, UnweightedAdversary,
};
use sched_core::charging::{build_charging, check_claims, report_to_json};
use sched_core::instance::validate_instance;
use sched_core::json::{instance_from_json, instance_to_json, schedule_to_json, trace_to_jsonl};
use sched_core::sim::{GreedyScheduler, OnlineAlgorithm, ReplanScheduler, SimulationError};
use sched_core::solver::{optimal_offline_with, SolverConfig, SolverError};
use sched_core::time::{format_rat, parse_rat};
use sched_core::{Instance, Rat, Weight, WeightModel};

use crate::{AdversaryArgs, Algo, AdversaryKind, ChargeArgs, CliError, SimulateArgs, SolveArgs};

pub fn read_instance(path: &str) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?;
    let instance =
        instance_from_json(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    let violations = validate_instance(&instance);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Input(format!(
            "{path} is not a valid instance:\n  {}",
            lines.join("\n  ")
        )));
    }
    Ok(instance)
}

pub fn write_file(path: &str, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Input(format!("cannot write {path}: {e}")))
}

pub fn parse_rational(text: &str, what: &str) -> Result<Rat, CliError> {
    parse_rat(text).map_err(|e| CliError::Usage(format!("bad {what} `{text}`: {e}")))
}

/// Branch-and-bound node cap from `SCHED_SOLVER_NODE_LIMIT`; unset or
/// empty means unlimited.
pub fn solver_config() -> Result<SolverConfig, CliError> {
    match std::env::var("SCHED_SOLVER_NODE_LIMIT") {
        Ok(raw) if !raw.trim().is_empty() => {
            let limit: u64 = raw.trim().parse().map_err(|_| {
                CliError::Usage(format!("SCHED_SOLVER_NODE_LIMIT must be an integer, got `{raw}`"))
            })?;
            Ok(SolverConfig {
                node_limit: Some(limit),
            })
        }
        _ => Ok(SolverConfig::default()),
    }
}

pub fn map_solver_err(err: SolverError) -> CliError {
    match err {
        SolverError::NodeLimit { limit } => CliError::Internal(format!(
            "solver aborted: node limit {limit} exceeded (raise SCHED_SOLVER_NODE_LIMIT)"
        )),
        SolverError::TooManyJobs { count, max } => CliError::Input(format!(
            "instance has {count} jobs; the exhaustive oracle allows {max}"
        )),
    }
}

pub fn map_sim_err(err: SimulationError) -> CliError {
    match err {
        SimulationError::Online(inner) => match inner {
            sched_core::sim::OnlineError::Solver(e) => map_solver_err(e),
        },
        other => CliError::Internal(other.to_string()),
    }
}

/// Twelve significant digits, plain decimal.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Exact values print as `num/den` with a decimal alongside; the exact
/// form is the authoritative one.
pub fn weight_display(w: &Weight) -> String {
    match w {
        Weight::Exact(r) => format!("{}/{} ({})", r.numer(), r.denom(), sig12(rat_f64(r))),
        Weight::Approx(x) => sig12(*x),
    }
}

pub fn rat_f64(r: &Rat) -> f64 {
    sched_core::time::rat_to_f64(r)
}

pub fn make_algorithm(algo: Algo, weights: &WeightModel, config: &SolverConfig) -> Box<dyn OnlineAlgorithm> {
    match algo {
        Algo::AOff => Box::new(ReplanScheduler::with_config(weights.clone(), config.clone())),
        Algo::Greedy => Box::new(GreedyScheduler::new(weights.clone())),
    }
}

pub fn solve(args: SolveArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.instance)?;
    let config = solver_config()?;
    let (schedule, stats) = optimal_offline_with(&instance, &config).map_err(map_solver_err)?;
    println!("optimal value: {}", weight_display(&schedule.value));
    println!(
        "jobs scheduled: {} of {}",
        schedule.entries.len(),
        instance.len()
    );
    println!("solver nodes: {} (pruned {})", stats.nodes, stats.prunes);
    for entry in &schedule.entries {
        let job = instance.job(entry.job).expect("entry from this instance");
        println!(
            "  job {} starts {} runs {}",
            entry.job, entry.start, job.processing
        );
    }
    if let Some(out) = &args.out {
        let text = schedule_to_json(&schedule)
            .map_err(|e| CliError::Internal(format!("schedule serialization: {e}")))?;
        write_file(out, &text)?;
        println!("schedule written to {out}");
    }
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.instance)?;
    let config = solver_config()?;
    let mut algorithm = make_algorithm(args.algo, &instance.weights, &config);
    let (trace, schedule) =
        sched_core::sim::simulate(&instance, algorithm.as_mut()).map_err(map_sim_err)?;
    println!("algorithm value: {}", weight_display(&schedule.value));
    println!(
        "events: {}, jobs executed: {} of {}",
        trace.events.len(),
        schedule.entries.len(),
        instance.len()
    );
    if let Some(out) = &args.out {
        let text = trace_to_jsonl(&trace)
            .map_err(|e| CliError::Internal(format!("trace serialization: {e}")))?;
        write_file(out, &text)?;
        println!("trace written to {out}");
    }
    if let Some(out) = &args.schedule_out {
        let text = schedule_to_json(&schedule)
            .map_err(|e| CliError::Internal(format!("schedule serialization: {e}")))?;
        write_file(out, &text)?;
        println!("schedule written to {out}");
    }
    Ok(())
}

pub fn build_adversary(
    kind: AdversaryKind,
    t: &Rat,
    eps: Option<&Rat>,
    n: Option<u32>,
) -> Result<Box<dyn Adversary>, CliError> {
    let guard = |e: AdversaryError| CliError::Usage(e.to_string());
    match kind {
        AdversaryKind::ProportionalLb => {
            let eps = eps.ok_or_else(|| {
                CliError::Usage("proportional-lb needs --eps".to_string())
            })?;
            Ok(Box::new(
                ProportionalLbAdversary::new(t.clone(), eps.clone()).map_err(guard)?,
            ))
        }
        AdversaryKind::Unweighted => {
            let n = n.ok_or_else(|| CliError::Usage("unweighted needs --n".to_string()))?;
            Ok(Box::new(UnweightedAdversary::new(t.clone(), n).map_err(guard)?))
        }
        AdversaryKind::CBenevolent => {
            let eps = eps
                .ok_or_else(|| CliError::Usage("c-benevolent needs --eps".to_string()))?;
            let n = n.ok_or_else(|| CliError::Usage("c-benevolent needs --n".to_string()))?;
            Ok(Box::new(
                CBenevolentAdversary::new(t.clone(), eps.clone(), n).map_err(guard)?,
            ))
        }
    }
}

pub fn run_adversary_once(
    kind: AdversaryKind,
    t: &Rat,
    eps: Option<&Rat>,
    n: Option<u32>,
    algo: Algo,
    config: &SolverConfig,
) -> Result<AdversaryOutcome, CliError> {
    let mut adversary = build_adversary(kind, t, eps, n)?;
    let weights = adversary.weight_model().clone();
    let mut algorithm = make_algorithm(algo, &weights, config);
    run_against_adversary(algorithm.as_mut(), adversary.as_mut()).map_err(|e| match e {
        AdversaryError::Guard(msg) => CliError::Usage(msg),
        AdversaryError::Simulation(sim) => map_sim_err(sim),
        other => CliError::Internal(other.to_string()),
    })
}

pub fn adversary(args: AdversaryArgs) -> Result<(), CliError> {
    let t = parse_rational(&args.t, "--t")?;
    let eps = args
        .eps
        .as_deref()
        .map(|e| parse_rational(e, "--eps"))
        .transpose()?;
    let config = solver_config()?;
    let outcome = run_adversary_once(args.adversary, &t, eps.as_ref(), args.n, args.algo, &config)?;

    println!("jobs emitted: {}", outcome.instance.len());
    println!("alg value: {}", weight_display(&outcome.alg_value));
    println!("opt value: {}", weight_display(&outcome.opt_value));
    println!("ratio:     {}", weight_display(&outcome.ratio));
    println!(
        "designed ratio target: {}",
        weight_display(&outcome.designed_ratio)
    );
    println!(
        "guaranteed floor t/(2t+1): {}",
        sig12(rat_f64(&sched_core::competitive_bound(&t)))
    );
    if outcome.unbounded {
        println!("outcome: unbounded (the algorithm earned nothing)");
    }
    if let Some(out) = &args.out {
        let text = instance_to_json(&outcome.instance)
            .map_err(|e| CliError::Internal(format!("instance serialization: {e}")))?;
        write_file(out, &text)?;
        println!("emitted instance written to {out}");
    }
    Ok(())
}

pub fn charge(args: ChargeArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.instance)?;
    if instance.weights != WeightModel::Proportional {
        return Err(CliError::Input(
            "charging is defined for proportional weights only".to_string(),
        ));
    }
    let config = solver_config()?;
    let mut algorithm = make_algorithm(Algo::AOff, &instance.weights, &config);
    let (_, alg_schedule) =
        sched_core::sim::simulate(&instance, algorithm.as_mut()).map_err(map_sim_err)?;
    let (opt_schedule, _) = optimal_offline_with(&instance, &config).map_err(map_solver_err)?;
    let report = build_charging(&instance, &opt_schedule, &alg_schedule)
        .map_err(|e| CliError::Internal(e.to_string()))?;

    println!("alg value: {}", weight_display(&alg_schedule.value));
    println!("opt value: {}", weight_display(&opt_schedule.value));
    println!(
        "charge conserved: {} (total {})",
        report.conserves_charge(),
        format_rat(&report.charged_total())
    );
    let violations = check_claims(&report, &instance.notice);
    let hard: Vec<_> = violations.iter().filter(|v| v.claim.is_hard()).collect();
    let soft: Vec<_> = violations.iter().filter(|v| !v.claim.is_hard()).collect();
    for v in &soft {
        println!(
            "warning {}: run {} charged {} > {}",
            v.claim.name(),
            v.alg_job,
            format_rat(&v.lhs),
            format_rat(&v.rhs)
        );
    }
    for job in &report.unmatched_self_charges {
        println!("warning unmatched-self: optimum ran job {job} which the algorithm skipped");
    }
    if let Some(out) = &args.out {
        write_file(out, &report_to_json(&report))?;
        println!("report written to {out}");
    }
    if !report.conserves_charge() {
        return Err(CliError::Internal("charge not conserved".to_string()));
    }
    if !hard.is_empty() {
        let lines: Vec<String> = hard
            .iter()
            .map(|v| {
                format!(
                    "run {} charged {} > cap {}",
                    v.alg_job,
                    format_rat(&v.lhs),
                    format_rat(&v.rhs)
                )
            })
            .collect();
        return Err(CliError::Internal(format!(
            "aggregate cap violated:\n  {}",
            lines.join("\n  ")
        )));
    }
    println!("aggregate cap (2 + 1/t) holds for every run");
    Ok(())
}
