//! Desk-scale workbench for online real-time throughput scheduling with
//! advance notice on a single machine.
//!
//! A job `(a, r, p, d)` is announced at `a`, may run uninterrupted for `p`
//! time units anywhere in `[r, d]`, and earns its weight if it finishes by
//! the deadline. When every job is announced at least `t * p` ahead of its
//! release, replanning with an exact offline solver at each announcement
//! guarantees at least `t/(2t+1)` of the offline optimum for proportional
//! weights; adaptive adversaries show the guarantee is essentially tight
//! and collapses for unweighted or convex weight curves.
//!
//! All time arithmetic is exact rational; floating point appears only in
//! the power weight model.

pub mod adversary;
pub mod charging;
pub mod generator;
pub mod instance;
pub mod job;
pub mod json;
pub mod schedule;
pub mod sim;
pub mod solver;
pub mod time;
pub mod weight;

pub use instance::{validate_instance, Instance, RuleViolation};
pub use job::{Job, JobId};
pub use schedule::{is_feasible_schedule, schedule_value, Schedule, ScheduleEntry};
pub use sim::{run_greedy, run_replan, simulate, OnlineAlgorithm, Plan, SimulationTrace};
pub use solver::{brute_force_opt, earliest_start_schedule, optimal_offline, SolverConfig, SolverStats};
pub use time::{Rat, Span, TimePoint};
pub use weight::{check_c_benevolent, weight_of, Weight, WeightModel};

use num_bigint::BigInt;

/// The guaranteed competitive ratio `t / (2t + 1)` for proportional
/// weights under `t`-advance notice.
pub fn competitive_bound(notice: &Rat) -> Rat {
    let one = Rat::from_integer(BigInt::from(1));
    let two = Rat::from_integer(BigInt::from(2));
    notice / (two * notice + one)
}
