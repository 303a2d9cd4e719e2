//! Dolan–Moré performance profiles.
//!
//! For problem `p` and solver `s` with time `t_{p,s}`, the ratio is
//! `r_{p,s} = t_{p,s} / min_{s'} t_{p,s'}` over solvers that solved `p`;
//! unsolved problems get `r = +inf`. The profile `rho_s(tau)` is the fraction
//! of problems with `r_{p,s} <= tau`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::RunResult;
use crate::error::{FeasError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver: String,
    /// Staircase corners `(tau, rho(tau))`, with `tau` increasing from 1.
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// Right-continuous evaluation of the staircase.
    pub fn rho_at(&self, tau: f64) -> f64 {
        self.points
            .iter()
            .take_while(|(t, _)| *t <= tau)
            .last()
            .map_or(0.0, |(_, r)| *r)
    }
}

/// Per-problem time ratios, keyed by solver, in problem order.
pub fn performance_ratios(results: &[RunResult]) -> Result<BTreeMap<String, Vec<f64>>> {
    if results.is_empty() {
        return Err(FeasError::EmptyResults);
    }
    let solvers: BTreeSet<&str> = results.iter().map(|r| r.solver.as_str()).collect();
    let mut problems: Vec<&str> = Vec::new();
    let mut by_problem: BTreeMap<&str, BTreeMap<&str, &RunResult>> = BTreeMap::new();
    for r in results {
        let entry = by_problem.entry(&r.problem_id).or_insert_with(|| {
            problems.push(&r.problem_id);
            BTreeMap::new()
        });
        if entry.insert(&r.solver, r).is_some() {
            return Err(FeasError::InvalidParams(format!(
                "duplicate result for problem {} and solver {}",
                r.problem_id, r.solver
            )));
        }
    }

    let mut ratios: BTreeMap<String, Vec<f64>> = solvers
        .iter()
        .map(|s| (s.to_string(), Vec::new()))
        .collect();
    for p in &problems {
        let runs = &by_problem[p];
        let time = |s: &str| runs.get(s).filter(|r| r.solved()).map(|r| r.wall_time_s);
        let best = solvers
            .iter()
            .filter_map(|s| time(s))
            .fold(f64::INFINITY, f64::min);
        for s in &solvers {
            let r = match time(s) {
                Some(t) if best.is_finite() => t / best,
                _ => f64::INFINITY,
            };
            ratios.get_mut(*s).expect("solver key").push(r);
        }
    }
    Ok(ratios)
}

/// One staircase per solver, each evaluated at every distinct finite ratio
/// observed across all solvers (and at `tau = 1`).
pub fn performance_profile(results: &[RunResult]) -> Result<Vec<ProfileCurve>> {
    let ratios = performance_ratios(results)?;
    let mut taus: Vec<f64> = ratios
        .values()
        .flatten()
        .copied()
        .filter(|r| r.is_finite())
        .chain(std::iter::once(1.0))
        .collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();

    Ok(ratios
        .into_iter()
        .map(|(solver, rs)| {
            let total = rs.len() as f64;
            let points = taus
                .iter()
                .map(|&tau| (tau, rs.iter().filter(|&&r| r <= tau).count() as f64 / total))
                .collect();
            ProfileCurve { solver, points }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::RunStatus;

    fn result(problem: &str, solver: &str, t: f64, status: RunStatus) -> RunResult {
        RunResult {
            problem_id: problem.into(),
            n: 1,
            m: 1,
            solver: solver.into(),
            status,
            iterations: 1,
            wall_time_s: t,
        }
    }

    fn ok(problem: &str, solver: &str, t: f64) -> RunResult {
        result(problem, solver, t, RunStatus::FeasibleExact)
    }

    fn curve<'a>(curves: &'a [ProfileCurve], s: &str) -> &'a ProfileCurve {
        curves.iter().find(|c| c.solver == s).unwrap()
    }

    #[test]
    fn hand_example() {
        let rs = vec![
            ok("p1", "s1", 1.0),
            ok("p2", "s1", 2.0),
            ok("p1", "s2", 2.0),
            ok("p2", "s2", 2.0),
        ];
        let curves = performance_profile(&rs).unwrap();
        assert_eq!(curve(&curves, "s1").rho_at(1.0), 1.0);
        assert_eq!(curve(&curves, "s2").rho_at(1.0), 0.5);
        assert_eq!(curve(&curves, "s2").rho_at(2.0), 1.0);
        assert_eq!(curve(&curves, "s2").rho_at(1.999), 0.5);
        assert_eq!(curve(&curves, "s2").rho_at(0.5), 0.0);
        assert_eq!(curve(&curves, "s2").points, vec![(1.0, 0.5), (2.0, 1.0)]);
    }

    #[test]
    fn single_solver_profile_is_fraction_solved() {
        let rs = vec![
            ok("p1", "a", 3.0),
            ok("p2", "a", 0.1),
            result("p3", "a", 1.0, RunStatus::MaxIterReached),
        ];
        let curves = performance_profile(&rs).unwrap();
        assert_eq!(curves.len(), 1);
        assert!((curves[0].rho_at(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((curves[0].rho_at(1e9) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn always_failing_solver_is_zero() {
        let rs = vec![
            ok("p1", "good", 1.0),
            result("p1", "bad", 0.5, RunStatus::MaxIterReached),
            ok("p2", "good", 1.0),
            result("p2", "bad", f64::NAN, RunStatus::Error),
        ];
        let curves = performance_profile(&rs).unwrap();
        let bad = curve(&curves, "bad");
        assert!(bad.points.iter().all(|(_, r)| *r == 0.0));
        assert_eq!(bad.rho_at(f64::MAX), 0.0);
        assert_eq!(curve(&curves, "good").rho_at(1.0), 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            performance_profile(&[]),
            Err(FeasError::EmptyResults)
        ));
        let dup = vec![ok("p", "s", 1.0), ok("p", "s", 2.0)];
        assert!(performance_profile(&dup).is_err());
    }

    #[test]
    fn missing_pair_counts_as_failure() {
        let rs = vec![ok("p1", "a", 1.0), ok("p1", "b", 2.0), ok("p2", "a", 1.0)];
        let curves = performance_profile(&rs).unwrap();
        assert_eq!(curve(&curves, "b").rho_at(100.0), 0.5);
    }
}
