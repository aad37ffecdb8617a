//! CSV and SVG export of simulation runs, plus CSV re-import for the plot
//! command and round-trip checks.

use super::{RobotTick, RunLog, RunMetrics, ScenarioConfig, TickRecord};
use crate::error::{Error, Result};
use crate::gaussian::{Matrix, Vector};
use std::fmt::Write as _;
use std::path::Path;

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

/// Writes `trajectory.csv`, `metrics.csv` and `trajectories.svg` under `dir`.
pub fn export_run(
    log: &RunLog,
    metrics: &RunMetrics,
    cfg: &ScenarioConfig,
    dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let traj_path = dir.join("trajectory.csv");
    std::fs::write(&traj_path, trajectory_csv(log, cfg)?).map_err(|e| io_err(&traj_path, e))?;
    let metrics_path = dir.join("metrics.csv");
    std::fs::write(&metrics_path, metrics_csv(metrics)).map_err(|e| io_err(&metrics_path, e))?;
    let svg_path = dir.join("trajectories.svg");
    std::fs::write(&svg_path, trajectories_svg(log, cfg)?).map_err(|e| io_err(&svg_path, e))?;
    Ok(())
}

pub fn trajectory_csv(log: &RunLog, cfg: &ScenarioConfig) -> Result<String> {
    let model = cfg.model()?;
    let sdim = model.state_dim();
    let cdim = model.control_dim();
    let mut out = String::new();
    out.push_str("tick,robot_id");
    for i in 0..sdim {
        let _ = write!(out, ",gt_{i}");
    }
    for i in 0..sdim {
        let _ = write!(out, ",bel_{i}");
    }
    for i in 0..sdim {
        for j in i..sdim {
            let _ = write!(out, ",cov_{i}_{j}");
        }
    }
    for i in 0..cdim {
        let _ = write!(out, ",u_{i}");
    }
    out.push_str(",min_margin\n");
    for rec in &log.records {
        for (idx, r) in rec.robots.iter().enumerate() {
            let _ = write!(out, "{},{}", rec.tick, cfg.robots[idx].id);
            for i in 0..sdim {
                let _ = write!(out, ",{}", r.ground_truth[i]);
            }
            for i in 0..sdim {
                let _ = write!(out, ",{}", r.belief_mean[i]);
            }
            for i in 0..sdim {
                for j in i..sdim {
                    let _ = write!(out, ",{}", r.belief_cov[(i, j)]);
                }
            }
            for i in 0..cdim {
                let _ = write!(out, ",{}", r.control[i]);
            }
            let _ = write!(out, ",{}\n", r.min_margin);
        }
    }
    Ok(out)
}

pub fn metrics_csv(metrics: &RunMetrics) -> String {
    let mut out = String::from("robot_id,length_m,duration_s,reached\n");
    for r in &metrics.robots {
        let _ = write!(out, "{},{},{},{}\n", r.id, r.length, r.duration, r.reached);
    }
    let _ = write!(
        out,
        "aggregate,min_center_distance={},collisions={},success={}\n",
        metrics.min_center_distance, metrics.collisions, metrics.success
    );
    out
}

/// Parses `trajectory.csv` back into a [`RunLog`] (one record per tick, robot
/// order as in the config).
pub fn read_trajectory_csv(text: &str, cfg: &ScenarioConfig) -> Result<RunLog> {
    let model = cfg.model()?;
    let sdim = model.state_dim();
    let cdim = model.control_dim();
    let n_cov = sdim * (sdim + 1) / 2;
    let expected_cols = 2 + 2 * sdim + n_cov + cdim + 1;
    let mut lines = text.lines().enumerate();
    let (_, _header) = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig("empty trajectory csv".into()))?;
    let mut log = RunLog::default();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_cols {
            return Err(Error::InvalidConfig(format!(
                "trajectory csv line {}: expected {} fields, got {}",
                lineno + 1,
                expected_cols,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!(
                    "trajectory csv line {}: bad number '{s}'",
                    lineno + 1
                ))
            })
        };
        let tick: usize = parse(fields[0])? as usize;
        let mut col = 2;
        let mut take = |n: usize| -> Result<Vec<f64>> {
            let vals: Result<Vec<f64>> = fields[col..col + n].iter().map(|s| parse(s)).collect();
            col += n;
            vals
        };
        let gt = Vector::from_vec(take(sdim)?);
        let bel = Vector::from_vec(take(sdim)?);
        let cov_ut = take(n_cov)?;
        let mut cov = Matrix::zeros(sdim, sdim);
        let mut k = 0;
        for i in 0..sdim {
            for j in i..sdim {
                cov[(i, j)] = cov_ut[k];
                cov[(j, i)] = cov_ut[k];
                k += 1;
            }
        }
        let u = Vector::from_vec(take(cdim)?);
        let min_margin = parse(fields[col])?;
        let row = RobotTick {
            ground_truth: gt,
            belief_mean: bel,
            belief_cov: cov,
            control: u,
            min_margin,
            plan_time_ms: 0.0,
        };
        match log.records.last_mut() {
            Some(rec) if rec.tick == tick => rec.robots.push(row),
            _ => log.records.push(TickRecord {
                tick,
                robots: vec![row],
            }),
        }
    }
    Ok(log)
}

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Renders the executed ground-truth trajectories. 2-D scenes get one top
/// view; 3-D scenes get a top (x-y) view above a side (x-z) view.
pub fn trajectories_svg(log: &RunLog, cfg: &ScenarioConfig) -> Result<String> {
    let model = cfg.model()?;
    let three_d = model.position_dim() == 3;
    let view = |ax: usize, ay: usize, y_off: f64, label: &str| -> String {
        render_view(log, cfg, ax, ay, y_off, label)
    };
    let (height, body) = if three_d {
        (
            1240.0,
            format!(
                "{}{}",
                view(0, 1, 0.0, "top view (x-y)"),
                view(0, 2, 620.0, "side view (x-z)")
            ),
        )
    } else {
        (620.0, view(0, 1, 0.0, "top view (x-y)"))
    };
    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"620\" height=\"{height}\" \
         viewBox=\"0 0 620 {height}\">\n<rect width=\"620\" height=\"{height}\" fill=\"white\"/>\n\
         {body}</svg>\n"
    ))
}

fn render_view(
    log: &RunLog,
    cfg: &ScenarioConfig,
    ax: usize,
    ay: usize,
    y_off: f64,
    label: &str,
) -> String {
    // bounding box over trajectories, goals and obstacles
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut expand = |x: f64, y: f64| {
        lo[0] = lo[0].min(x);
        lo[1] = lo[1].min(y);
        hi[0] = hi[0].max(x);
        hi[1] = hi[1].max(y);
    };
    for rec in &log.records {
        for r in &rec.robots {
            expand(r.ground_truth[ax], r.ground_truth[ay]);
        }
    }
    for r in &cfg.robots {
        if r.goal.len() > ax.max(ay) {
            expand(r.goal[ax], r.goal[ay]);
        }
    }
    for o in &cfg.static_obstacles {
        if o.position.len() > ax.max(ay) {
            expand(o.position[ax] - o.radius, o.position[ay] - o.radius);
            expand(o.position[ax] + o.radius, o.position[ay] + o.radius);
        }
    }
    if !lo[0].is_finite() {
        lo = [-1.0, -1.0];
        hi = [1.0, 1.0];
    }
    let pad = 0.3;
    let span = ((hi[0] - lo[0]).max(hi[1] - lo[1]) + 2.0 * pad).max(1e-6);
    let scale = 560.0 / span;
    let cx = 0.5 * (lo[0] + hi[0]);
    let cy = 0.5 * (lo[1] + hi[1]);
    let px = move |x: f64| 310.0 + (x - cx) * scale;
    let py = move |y: f64, y_off: f64| y_off + 330.0 - (y - cy) * scale;

    let mut out = String::new();
    let _ = write!(
        out,
        "<text x=\"20\" y=\"{}\" font-family=\"sans-serif\" font-size=\"16\">{label}</text>\n",
        y_off + 30.0
    );
    for o in &cfg.static_obstacles {
        if o.position.len() > ax.max(ay) {
            let _ = write!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"#cccccc\" stroke=\"#555555\"/>\n",
                px(o.position[ax]),
                py(o.position[ay], y_off),
                o.radius * scale
            );
        }
    }
    for (i, _) in cfg.robots.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points = String::new();
        for rec in &log.records {
            let r = &rec.robots[i];
            let _ = write!(
                points,
                "{:.2},{:.2} ",
                px(r.ground_truth[ax]),
                py(r.ground_truth[ay], y_off)
            );
        }
        let _ = write!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            points.trim_end()
        );
        if cfg.robots[i].goal.len() > ax.max(ay) {
            let _ = write!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"none\" stroke=\"{color}\"/>\n",
                px(cfg.robots[i].goal[ax]),
                py(cfg.robots[i].goal[ay], y_off)
            );
        }
    }
    out
}
