//! CSV and SVG output for benchmark results.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use super::profile::ProfileCurve;
use super::stats::SolverStats;
use super::RunResult;
use crate::error::{FeasError, Result};

/// Column order of the results file.
pub const RESULTS_HEADER: [&str; 7] = [
    "problem_id",
    "n",
    "m",
    "solver",
    "status",
    "iterations",
    "wall_time_s",
];

fn write_rows<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(FeasError::EmptyResults);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| FeasError::Io(e.into_error()))?;
    fs::write(path, bytes)?;
    Ok(())
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(FeasError::from))
        .collect()
}

pub fn write_results_csv(results: &[RunResult], path: &Path) -> Result<()> {
    write_rows(results, path)
}

pub fn read_results_csv(path: &Path) -> Result<Vec<RunResult>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(FeasError::parse(
            format!("{}: header", path.display()),
            format!(
                "expected {}, got {}",
                RESULTS_HEADER.join(","),
                header.join(",")
            ),
        ));
    }
    drop(r);
    read_rows(path)
}

pub fn write_stats_csv(stats: &[SolverStats], path: &Path) -> Result<()> {
    write_rows(stats, path)
}

pub fn read_stats_csv(path: &Path) -> Result<Vec<SolverStats>> {
    read_rows(path)
}

#[derive(serde::Serialize, serde::Deserialize, Debug, PartialEq)]
struct ProfileRow {
    solver: String,
    tau: f64,
    rho: f64,
}

/// Long format: one `solver,tau,rho` row per staircase corner.
pub fn write_profile_csv(curves: &[ProfileCurve], path: &Path) -> Result<()> {
    let rows: Vec<ProfileRow> = curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(|&(tau, rho)| ProfileRow {
                solver: c.solver.clone(),
                tau,
                rho,
            })
        })
        .collect();
    write_rows(&rows, path)
}

pub fn read_profile_csv(path: &Path) -> Result<Vec<ProfileCurve>> {
    let rows: Vec<ProfileRow> = read_rows(path)?;
    let mut curves: Vec<ProfileCurve> = Vec::new();
    for row in rows {
        match curves.last_mut() {
            Some(c) if c.solver == row.solver => c.points.push((row.tau, row.rho)),
            _ => curves.push(ProfileCurve {
                solver: row.solver,
                points: vec![(row.tau, row.rho)],
            }),
        }
    }
    Ok(curves)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

/// Renders the profiles as an SVG staircase plot with a `log2(tau)` axis.
pub fn render_profile_svg(curves: &[ProfileCurve]) -> Result<String> {
    if curves.is_empty() {
        return Err(FeasError::EmptyResults);
    }
    let max_log = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|(t, _)| t.log2()))
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let x_max = if max_log > 0.0 { max_log * 1.05 } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |log_tau: f64| LEFT + plot_w * (log_tau / x_max);
    let py = |rho: f64| TOP + plot_h * (1.0 - rho);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let rho = i as f64 / 4.0;
        let y = py(rho);
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="lightgray"/><text x="{:.3}" y="{:.3}" text-anchor="end">{rho:.2}</text>"#,
            LEFT,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let ticks = x_max.ceil() as usize;
    let step = (ticks / 8).max(1);
    for t in (0..=ticks).step_by(step) {
        let x = px(t as f64);
        if x > LEFT + plot_w + 1e-9 {
            break;
        }
        let _ = writeln!(
            s,
            r#"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/><text x="{x:.3}" y="{:.3}" text-anchor="middle">{t}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">log2(tau)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.3}" text-anchor="middle" transform="rotate(-90 15 {:.3})">fraction of problems</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts: Vec<(f64, f64)> = Vec::new();
        let mut prev_rho: Option<f64> = None;
        for &(tau, rho) in &c.points {
            let x = px(tau.log2().max(0.0));
            if let Some(pr) = prev_rho {
                pts.push((x, py(pr)));
            }
            pts.push((x, py(rho)));
            prev_rho = Some(rho);
        }
        if let Some(pr) = prev_rho {
            pts.push((px(x_max), py(pr)));
        }
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="profile" data-solver="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            escape(&c.solver),
            coords.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.3}" y1="{ly:.3}" x2="{:.3}" y2="{ly:.3}" stroke="{color}" stroke-width="2"/><text x="{:.3}" y="{:.3}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&c.solver)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Maps an SVG y coordinate back to a profile value.
pub fn svg_y_to_rho(y: f64) -> f64 {
    1.0 - (y - TOP) / (HEIGHT - TOP - BOTTOM)
}

pub fn emit_profile_svg(curves: &[ProfileCurve], path: &Path) -> Result<()> {
    let svg = render_profile_svg(curves)?;
    fs::write(path, svg)?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
