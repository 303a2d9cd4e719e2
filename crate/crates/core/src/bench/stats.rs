use serde::{Deserialize, Serialize};

use super::RunResult;
use crate::error::{FeasError, Result};

/// Wall-time aggregates for one solver over its completed runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub solver: String,
    pub completed: usize,
    pub failed: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

fn median_of_sorted(xs: &[f64]) -> f64 {
    let n = xs.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => xs[n / 2],
        _ => 0.5 * (xs[n / 2 - 1] + xs[n / 2]),
    }
}

pub(crate) fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    median_of_sorted(xs)
}

/// One row per solver, in order of first appearance. Failed runs are
/// counted but excluded from the time statistics.
pub fn summarize_stats(results: &[RunResult]) -> Result<Vec<SolverStats>> {
    if results.is_empty() {
        return Err(FeasError::EmptyResults);
    }
    let mut order: Vec<&str> = Vec::new();
    for r in results {
        if !order.contains(&r.solver.as_str()) {
            order.push(&r.solver);
        }
    }
    Ok(order
        .into_iter()
        .map(|solver| {
            let runs: Vec<&RunResult> = results.iter().filter(|r| r.solver == solver).collect();
            let mut times: Vec<f64> = runs
                .iter()
                .filter(|r| r.solved())
                .map(|r| r.wall_time_s)
                .collect();
            times.sort_by(f64::total_cmp);
            let completed = times.len();
            let (mean, min, max) = if completed == 0 {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                (
                    times.iter().sum::<f64>() / completed as f64,
                    times[0],
                    times[completed - 1],
                )
            };
            SolverStats {
                solver: solver.to_string(),
                completed,
                failed: runs.len() - completed,
                mean,
                median: median_of_sorted(&times),
                min,
                max,
            }
        })
        .collect())
}
