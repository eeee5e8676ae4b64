//! Schedule rendering: a fixed-geometry SVG chart (or plain text), one
//! lane per schedule, release and announcement markers from the instance.
//! Output bytes are a pure function of the inputs.

use std::fmt::Write as _;
use std::fs;

use sched_core::json::schedule_from_json;
use sched_core::time::format_rat;
use sched_core::{Instance, Schedule};

use crate::commands::{rat_f64, read_instance};
use crate::{CliError, GanttArgs, GanttFormat};

const WIDTH: f64 = 960.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 24.0;
const STRIP_TOP: f64 = 26.0;
const STRIP_HEIGHT: f64 = 16.0;
const LANE_TOP: f64 = 52.0;
const LANE_HEIGHT: f64 = 42.0;
const LANE_GAP: f64 = 14.0;
const AXIS_GAP: f64 = 26.0;

const LANE_FILLS: [&str; 2] = ["#4e79a7", "#f28e2b"];

struct Run {
    job: u32,
    start: f64,
    end: f64,
}

struct Lane {
    label: String,
    runs: Vec<Run>,
}

fn lanes_from(instance: &Instance, schedules: &[(String, Schedule)]) -> Result<Vec<Lane>, CliError> {
    schedules
        .iter()
        .map(|(label, schedule)| {
            let mut runs = Vec::new();
            for entry in &schedule.entries {
                let job = instance.job(entry.job).ok_or_else(|| {
                    CliError::Input(format!(
                        "schedule references job {} missing from the instance",
                        entry.job
                    ))
                })?;
                let start = rat_f64(entry.start.as_rat());
                runs.push(Run {
                    job: entry.job.0,
                    start,
                    end: start + rat_f64(job.processing.as_rat()),
                });
            }
            runs.sort_by(|a, b| a.start.total_cmp(&b.start));
            Ok(Lane {
                label: label.clone(),
                runs,
            })
        })
        .collect()
}

/// 1-2-5 axis step giving at most ~8 divisions.
fn nice_step(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    for mult in [1.0, 2.0, 5.0, 10.0] {
        if mag * mult >= raw {
            return mag * mult;
        }
    }
    mag * 10.0
}

fn render_svg(instance: &Instance, lanes: &[Lane]) -> String {
    let mut max_t: f64 = 1e-9;
    for lane in lanes {
        for run in &lane.runs {
            max_t = max_t.max(run.end);
        }
    }
    for job in &instance.jobs {
        max_t = max_t.max(rat_f64(job.release.as_rat()));
    }
    if max_t < 1.0 {
        max_t = 1.0;
    }
    let span_px = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let x = |t: f64| MARGIN_LEFT + t / max_t * span_px;

    let lanes_bottom = LANE_TOP + lanes.len() as f64 * (LANE_HEIGHT + LANE_GAP);
    let axis_y = lanes_bottom + 4.0;
    let height = axis_y + AXIS_GAP;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH} {height:.0}\">"
    );
    svg.push_str("<style>text{font-family:monospace;font-size:11px;fill:#222}</style>\n");
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{height:.0}\" fill=\"#ffffff\"/>"
    );

    // axis with ticks
    let _ = writeln!(
        svg,
        "<line x1=\"{:.2}\" y1=\"{axis_y:.2}\" x2=\"{:.2}\" y2=\"{axis_y:.2}\" stroke=\"#222\"/>",
        x(0.0),
        x(max_t)
    );
    let step = nice_step(max_t);
    let mut i = 0u32;
    loop {
        let tick = f64::from(i) * step;
        if tick > max_t * (1.0 + 1e-12) {
            break;
        }
        let tx = x(tick);
        let _ = writeln!(
            svg,
            "<line x1=\"{tx:.2}\" y1=\"{axis_y:.2}\" x2=\"{tx:.2}\" y2=\"{:.2}\" stroke=\"#222\"/>",
            axis_y + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{tx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{tick}</text>",
            axis_y + 18.0
        );
        i += 1;
    }

    // announcement (triangle) and release (tick) markers
    for job in &instance.jobs {
        let a = rat_f64(job.announce.as_rat());
        let r = rat_f64(job.release.as_rat());
        if a <= max_t {
            let ax = x(a);
            let y0 = STRIP_TOP;
            let y1 = STRIP_TOP + 8.0;
            let _ = writeln!(
                svg,
                "<path d=\"M {ax:.2} {y1:.2} L {:.2} {y0:.2} L {:.2} {y0:.2} Z\" fill=\"#777\"><title>job {} announced at {}</title></path>",
                ax - 4.0,
                ax + 4.0,
                job.id,
                format_rat(job.announce.as_rat())
            );
        }
        if r <= max_t {
            let rx = x(r);
            let _ = writeln!(
                svg,
                "<line x1=\"{rx:.2}\" y1=\"{:.2}\" x2=\"{rx:.2}\" y2=\"{:.2}\" stroke=\"#777\"><title>job {} released at {}</title></line>",
                STRIP_TOP + 10.0,
                STRIP_TOP + STRIP_HEIGHT,
                job.id,
                format_rat(job.release.as_rat())
            );
        }
    }

    for (i, lane) in lanes.iter().enumerate() {
        let top = LANE_TOP + i as f64 * (LANE_HEIGHT + LANE_GAP);
        let fill = LANE_FILLS[i % LANE_FILLS.len()];
        let _ = writeln!(
            svg,
            "<text x=\"4\" y=\"{:.2}\">{}</text>",
            top + LANE_HEIGHT / 2.0 + 4.0,
            lane.label
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#ddd\"/>",
            x(0.0),
            top + LANE_HEIGHT,
            x(max_t),
            top + LANE_HEIGHT
        );
        for run in &lane.runs {
            let rx = x(run.start);
            let rw = (x(run.end) - rx).max(1.0);
            let _ = writeln!(
                svg,
                "<rect x=\"{rx:.2}\" y=\"{:.2}\" width=\"{rw:.2}\" height=\"{:.2}\" fill=\"{fill}\" stroke=\"#222\"/>",
                top + 4.0,
                LANE_HEIGHT - 8.0
            );
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#fff\">{}</text>",
                rx + rw / 2.0,
                top + LANE_HEIGHT / 2.0 + 4.0,
                run.job
            );
        }
    }

    svg.push_str("</svg>\n");
    svg
}

fn render_text(instance: &Instance, lanes: &[Lane], schedules: &[(String, Schedule)]) -> String {
    let mut out = String::new();
    for (lane, (_, schedule)) in lanes.iter().zip(schedules) {
        let _ = writeln!(out, "lane {}:", lane.label);
        if schedule.entries.is_empty() {
            let _ = writeln!(out, "  (empty)");
        }
        for entry in &schedule.entries {
            let job = instance.job(entry.job).expect("checked in lanes_from");
            let end = job.end_for_start(&entry.start);
            let _ = writeln!(out, "  job {} runs [{}, {})", entry.job, entry.start, end);
        }
    }
    let _ = writeln!(out, "markers:");
    for job in &instance.jobs {
        let _ = writeln!(
            out,
            "  job {}: announced {}, released {}, length {}, deadline {}",
            job.id, job.announce, job.release, job.processing, job.deadline
        );
    }
    out
}

pub fn run(args: GanttArgs) -> Result<(), CliError> {
    if args.schedule.len() > 2 {
        return Err(CliError::Usage(
            "gantt takes at most two --schedule files (alg above, opt below)".to_string(),
        ));
    }
    let instance = read_instance(&args.instance)?;
    let mut schedules = Vec::new();
    for (i, path) in args.schedule.iter().enumerate() {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?;
        let schedule =
            schedule_from_json(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        let label = if args.schedule.len() == 2 {
            ["alg", "opt"][i].to_string()
        } else {
            "schedule".to_string()
        };
        schedules.push((label, schedule));
    }
    let lanes = lanes_from(&instance, &schedules)?;
    let rendered = match args.format {
        GanttFormat::Svg => render_svg(&instance, &lanes),
        GanttFormat::Text => render_text(&instance, &lanes, &schedules),
    };
    fs::write(&args.out, rendered)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", args.out)))?;
    println!("chart written to {}", args.out);
    Ok(())
}
