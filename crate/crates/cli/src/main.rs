mod commands;
mod gantt;
mod sweep;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit codes: 0 success, 1 usage, 2 input error, 3 internal limit or
/// invariant breach.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sched",
    about = "Single-machine throughput scheduling workbench with advance notice",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Algo {
    /// Replan with the exact offline solver at every announcement.
    #[value(name = "a_off")]
    AOff,
    /// Start the heaviest currently feasible job whenever idle.
    Greedy,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum AdversaryKind {
    /// Zero-slack batch inside the committed run; proportional weights.
    ProportionalLb,
    /// N disjoint unit-weight windows inside the committed run.
    Unweighted,
    /// One convex-weight exchange; power weight model.
    CBenevolent,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum GanttFormat {
    Svg,
    Text,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: String,
    /// Write the optimal schedule as JSON.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    instance: String,
    #[arg(long, value_enum, default_value = "a_off")]
    algo: Algo,
    /// Write the event trace as JSON lines.
    #[arg(long)]
    out: Option<String>,
    /// Write the executed schedule as JSON.
    #[arg(long)]
    schedule_out: Option<String>,
}

#[derive(Args)]
struct AdversaryArgs {
    #[arg(long, value_enum)]
    adversary: AdversaryKind,
    /// Notice level t as NUM/DEN.
    #[arg(long)]
    t: String,
    /// Epsilon as NUM/DEN (proportional-lb and c-benevolent).
    #[arg(long)]
    eps: Option<String>,
    /// Batch size N (unweighted and c-benevolent).
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_enum, default_value = "a_off")]
    algo: Algo,
    /// Dump the emitted instance as JSON.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Notice levels t as NUM/DEN; repeatable.
    #[arg(long, required = true)]
    t: Vec<String>,
    /// Random trials per notice level.
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Maximum jobs per random instance.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Base seed; trial seeds count up from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "a_off")]
    algo: Algo,
    /// Sweep the adversary instead of random instances.
    #[arg(long, value_enum)]
    adversary: Option<AdversaryKind>,
    /// Epsilon for the adversary sweep.
    #[arg(long)]
    eps: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct GanttArgs {
    #[arg(long)]
    instance: String,
    /// Schedule JSON; give once (one lane) or twice (alg above, opt below).
    #[arg(long, num_args = 1, action = clap::ArgAction::Append, required = true)]
    schedule: Vec<String>,
    #[arg(long, value_enum, default_value = "svg")]
    format: GanttFormat,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct ChargeArgs {
    #[arg(long)]
    instance: String,
    /// Write the charge report as JSON.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance offline and print the exact optimal value.
    Solve(SolveArgs),
    /// Run an online algorithm over an instance and print its value.
    Simulate(SimulateArgs),
    /// Run an adaptive adversary against an online algorithm.
    Adversary(AdversaryArgs),
    /// Random or adversarial trials across notice levels, CSV output.
    Sweep(SweepArgs),
    /// Render schedules as an SVG (or text) chart.
    Gantt(GanttArgs),
    /// Charge the optimum against an online run and check the caps.
    Charge(ChargeArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // keep clap's rendered message but our exit-code contract
            let rendered = err.render().to_string();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{rendered}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{rendered}");
                    ExitCode::from(1)
                }
            };
        }
    };

    let result = match cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Adversary(args) => commands::adversary(args),
        Command::Sweep(args) => sweep::run(args),
        Command::Gantt(args) => gantt::run(args),
        Command::Charge(args) => commands::charge(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("sched: {err}");
            ExitCode::from(err.code())
        }
    }
}
