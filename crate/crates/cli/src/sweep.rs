use std::fs;

use rayon::prelude::*;

use sched_core::generator::{random_instance, GeneratorParams};
use sched_core::sim::simulate;
use sched_core::solver::optimal_offline_with;
use sched_core::time::format_rat;
use sched_core::{competitive_bound, Rat, WeightModel};

use crate::commands::{
    make_algorithm, map_sim_err, map_solver_err, parse_rational, rat_f64, run_adversary_once,
    sig12, solver_config,
};
use crate::{CliError, SweepArgs};

pub const CSV_HEADER: &str = "t,n,seed,alg_num,alg_den,opt_num,opt_den,ratio,bound,ok,nodes,ms";

struct Row {
    t: Rat,
    n: usize,
    seed: u64,
    alg: Rat,
    opt: Rat,
    nodes: u64,
    ms: u128,
}

impl Row {
    /// `ok` is the exact comparison `alg >= t/(2t+1) * opt`; the decimal
    /// ratio and bound columns are display-only.
    fn to_csv(&self) -> String {
        let bound = competitive_bound(&self.t);
        let ok = self.alg >= &bound * &self.opt;
        let ratio = if self.opt == Rat::new(0.into(), 1.into()) {
            1.0
        } else {
            rat_f64(&self.alg) / rat_f64(&self.opt)
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            format_rat(&self.t),
            self.n,
            self.seed,
            self.alg.numer(),
            self.alg.denom(),
            self.opt.numer(),
            self.opt.denom(),
            sig12(ratio),
            sig12(rat_f64(&bound)),
            ok,
            self.nodes,
            self.ms
        )
    }

    fn exact_ratio(&self) -> Rat {
        if self.opt == Rat::new(0.into(), 1.into()) {
            Rat::new(1.into(), 1.into())
        } else {
            &self.alg / &self.opt
        }
    }
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let notices: Vec<Rat> = args
        .t
        .iter()
        .map(|raw| parse_rational(raw, "--t"))
        .collect::<Result<_, _>>()?;
    let config = solver_config()?;

    let rows: Vec<((usize, u64), Row)> = if let Some(kind) = args.adversary {
        // one deterministic adversarial trial per notice level
        let eps = args
            .eps
            .as_deref()
            .map(|e| parse_rational(e, "--eps"))
            .transpose()?;
        let mut rows = Vec::new();
        for (ti, notice) in notices.iter().enumerate() {
            let started = std::time::Instant::now();
            let outcome =
                run_adversary_once(kind, notice, eps.as_ref(), args.n.try_into().ok(), args.algo, &config)?;
            let alg = outcome
                .alg_value
                .as_exact()
                .ok_or_else(|| {
                    CliError::Usage("adversary sweeps need an exact weight model".to_string())
                })?
                .clone();
            let opt = outcome.opt_value.as_exact().expect("same model").clone();
            rows.push((
                (ti, 0),
                Row {
                    t: notice.clone(),
                    n: outcome.instance.len(),
                    seed: args.seed,
                    alg,
                    opt,
                    nodes: outcome.solver_stats.nodes,
                    ms: started.elapsed().as_millis(),
                },
            ));
        }
        rows
    } else {
        // random trials, embarrassingly parallel, merged in key order
        let keys: Vec<(usize, u64)> = notices
            .iter()
            .enumerate()
            .flat_map(|(ti, _)| (0..args.trials).map(move |trial| (ti, trial)))
            .collect();
        keys.into_par_iter()
            .map(|(ti, trial)| {
                let notice = &notices[ti];
                let seed = args.seed + trial;
                let n = (trial as usize) % (args.n + 1);
                let params =
                    GeneratorParams::standard(n, notice.clone(), WeightModel::Proportional);
                let instance = random_instance(&params, seed)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                let started = std::time::Instant::now();
                let mut algorithm = make_algorithm(args.algo, &instance.weights, &config);
                let (_, schedule) =
                    simulate(&instance, algorithm.as_mut()).map_err(map_sim_err)?;
                let (opt, stats) =
                    optimal_offline_with(&instance, &config).map_err(map_solver_err)?;
                Ok((
                    (ti, trial),
                    Row {
                        t: notice.clone(),
                        n: instance.len(),
                        seed,
                        alg: schedule.value.as_exact().expect("proportional").clone(),
                        opt: opt.value.as_exact().expect("proportional").clone(),
                        nodes: stats.nodes,
                        ms: started.elapsed().as_millis(),
                    },
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?
    };

    let mut rows = rows;
    rows.sort_by_key(|(key, _)| *key);

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for (_, row) in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    fs::write(&args.out, &csv)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", args.out)))?;

    for (ti, notice) in notices.iter().enumerate() {
        let group: Vec<&Row> = rows
            .iter()
            .filter(|((i, _), _)| *i == ti)
            .map(|(_, r)| r)
            .collect();
        if group.is_empty() {
            continue;
        }
        let bound = competitive_bound(notice);
        let min_ratio = group
            .iter()
            .map(|r| r.exact_ratio())
            .min()
            .expect("nonempty");
        let all_ok = group.iter().all(|r| r.alg >= &bound * &r.opt);
        println!(
            "t={}: trials={} min_ratio={} bound={} all_above_bound={}",
            format_rat(notice),
            group.len(),
            sig12(rat_f64(&min_ratio)),
            sig12(rat_f64(&bound)),
            all_ok
        );
    }
    println!("csv written to {}", args.out);
    Ok(())
}
