//! Benchmark suite over random ellipsoid instances: timing, statistics and
//! performance profiles.

mod profile;
mod report;
mod stats;

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use profile::{performance_profile, performance_ratios, ProfileCurve};
pub use report::{
    emit_profile_svg, read_profile_csv, read_results_csv, read_stats_csv, render_profile_svg,
    svg_y_to_rho, write_profile_csv, write_results_csv, write_stats_csv, RESULTS_HEADER,
};
pub use stats::{summarize_stats, SolverStats};

use crate::error::{FeasError, Result};
use crate::model::{generate_ellipsoid_instance, sample_infeasible_start, CfpInstance, GenParams};
use crate::schedule::PerturbationSchedule;
use crate::solver::{run, Algorithm, SolveStatus, SolverConfig, TraceMode};

/// Environment variable capping the worker pool of [`run_suite`].
pub const THREADS_ENV: &str = "FEASKIT_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    FeasibleExact,
    FeasibleWithinTol,
    MaxIterReached,
    Error,
}

impl From<SolveStatus> for RunStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::FeasibleExact => RunStatus::FeasibleExact,
            SolveStatus::FeasibleWithinTol => RunStatus::FeasibleWithinTol,
            SolveStatus::MaxIterReached => RunStatus::MaxIterReached,
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One (problem, solver) cell of a suite; also one row of the results CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub problem_id: String,
    pub n: usize,
    pub m: usize,
    pub solver: String,
    pub status: RunStatus,
    pub iterations: usize,
    /// Median over the timed repetitions.
    pub wall_time_s: f64,
}

impl RunResult {
    pub fn solved(&self) -> bool {
        matches!(
            self.status,
            RunStatus::FeasibleExact | RunStatus::FeasibleWithinTol
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedSolver {
    pub name: String,
    pub config: SolverConfig,
}

impl NamedSolver {
    pub fn new(name: impl Into<String>, config: SolverConfig) -> Self {
        Self {
            name: name.into(),
            config,
        }
    }
}

/// PACA1/2, SSPM1/2, MCSP1/2 and CARMprod; suffix 1 uses `1/(k+1)`, suffix 2 uses `1/sqrt(k+1)`.
pub fn default_solvers() -> Vec<NamedSolver> {
    let mut v = Vec::new();
    for (alg, name) in [
        (Algorithm::Paca, "PACA"),
        (Algorithm::Sspm, "SSPM"),
        (Algorithm::Mcsp, "MCSP"),
    ] {
        v.push(NamedSolver::new(
            format!("{name}1"),
            SolverConfig::new(alg, PerturbationSchedule::HARMONIC),
        ));
        v.push(NamedSolver::new(
            format!("{name}2"),
            SolverConfig::new(alg, PerturbationSchedule::INV_SQRT),
        ));
    }
    v.push(NamedSolver::new("CARMprod", SolverConfig::carm_prod()));
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub counts: Vec<usize>,
    pub instances_per_cell: usize,
    /// Timed repetitions per run, after one discarded warmup.
    pub repetitions: usize,
    pub solvers: Vec<NamedSolver>,
    pub master_seed: u64,
    pub gen_params: GenParams,
    /// Run cells one after another on the calling thread.
    pub sequential: bool,
    /// Worker cap; falls back to `FEASKIT_THREADS`, then to rayon's default.
    pub threads: Option<usize>,
    /// When set, `results.csv` is written here.
    pub output_dir: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn new(
        dims: Vec<usize>,
        counts: Vec<usize>,
        instances_per_cell: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            dims,
            counts,
            instances_per_cell,
            repetitions: 1,
            solvers: default_solvers(),
            master_seed,
            gen_params: GenParams::default(),
            sequential: false,
            threads: None,
            output_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(FeasError::InvalidParams("repetitions must be >= 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(FeasError::InvalidParams(
                "at least one solver is required".into(),
            ));
        }
        if self.dims.iter().chain(&self.counts).any(|&v| v == 0) {
            return Err(FeasError::InvalidParams(
                "dimensions and counts must be positive".into(),
            ));
        }
        let mut names: Vec<&str> = self.solvers.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(FeasError::InvalidParams(
                "solver names must be unique".into(),
            ));
        }
        for s in &self.solvers {
            s.config.validate()?;
        }
        self.gen_params.validate()
    }
}

/// SplitMix64 finaliser, used to derive independent per-problem seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of instance `index` in cell `(n, m)`.
pub fn instance_seed(master: u64, n: usize, m: usize, index: usize) -> u64 {
    mix(mix(mix(mix(master) ^ n as u64) ^ m as u64) ^ index as u64)
}

/// A generated suite problem with its starting point.
#[derive(Clone, Debug)]
pub struct SuiteProblem {
    pub instance: CfpInstance,
    pub x0: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub index: usize,
}

/// Generates every problem of the suite, in (dim, count, index) order.
pub fn suite_problems(cfg: &SuiteConfig) -> Result<Vec<SuiteProblem>> {
    let mut out = Vec::new();
    for &n in &cfg.dims {
        for &m in &cfg.counts {
            for index in 0..cfg.instances_per_cell {
                let seed = instance_seed(cfg.master_seed, n, m, index);
                let instance = generate_ellipsoid_instance(n, m, seed, &cfg.gen_params)?;
                let x0 = sample_infeasible_start(&instance, mix(seed))?;
                out.push(SuiteProblem {
                    instance,
                    x0,
                    n,
                    m,
                    index,
                });
            }
        }
    }
    Ok(out)
}

fn time_cell(problem: &SuiteProblem, solver: &NamedSolver, repetitions: usize) -> RunResult {
    let mut config = solver.config.clone();
    config.trace = TraceMode::Off;
    let base = RunResult {
        problem_id: problem.instance.id().to_string(),
        n: problem.n,
        m: problem.m,
        solver: solver.name.clone(),
        status: RunStatus::Error,
        iterations: 0,
        wall_time_s: f64::NAN,
    };
    let mut times = Vec::with_capacity(repetitions);
    let mut last = None;
    for rep in 0..=repetitions {
        let start = Instant::now();
        let outcome = run(&config, &problem.instance, &problem.x0);
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(report) => {
                if rep > 0 {
                    times.push(elapsed.max(f64::MIN_POSITIVE));
                }
                last = Some(report);
            }
            Err(_) => return base,
        }
    }
    let report = last.expect("at least one run");
    RunResult {
        status: report.status.into(),
        iterations: report.iterations,
        wall_time_s: stats::median(&mut times),
        ..base
    }
}

fn worker_count(cfg: &SuiteConfig) -> Option<usize> {
    cfg.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
    })
}

/// Runs every solver on every generated problem. Each timed run executes
/// `repetitions + 1` times with the first discarded; the recorded time is
/// the median of the rest. Solver errors become `Error` rows. Results are
/// ordered by problem (dim, count, index) and then solver name, whatever
/// the execution order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    let problems = suite_problems(cfg)?;
    let mut solvers: Vec<&NamedSolver> = cfg.solvers.iter().collect();
    solvers.sort_by(|a, b| a.name.cmp(&b.name));
    let cells: Vec<(&SuiteProblem, &NamedSolver)> = problems
        .iter()
        .flat_map(|p| solvers.iter().map(move |s| (p, *s)))
        .collect();

    let results: Vec<RunResult> = if cfg.sequential {
        cells
            .iter()
            .map(|(p, s)| time_cell(p, s, cfg.repetitions))
            .collect()
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = worker_count(cfg) {
            builder = builder.num_threads(t);
        }
        let pool = builder
            .build()
            .map_err(|e| FeasError::InvalidParams(format!("cannot build worker pool: {e}")))?;
        pool.install(|| {
            cells
                .par_iter()
                .map(|(p, s)| time_cell(p, s, cfg.repetitions))
                .collect()
        })
    };

    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir)?;
        write_results_csv(&results, &dir.join("results.csv"))?;
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(seed: u64) -> SuiteConfig {
        let mut cfg = SuiteConfig::new(vec![4], vec![3], 1, seed);
        cfg.solvers = vec![
            NamedSolver::new(
                "PACA2",
                SolverConfig::new(Algorithm::Paca, PerturbationSchedule::INV_SQRT),
            ),
            NamedSolver::new(
                "SSPM1",
                SolverConfig::new(Algorithm::Sspm, PerturbationSchedule::HARMONIC),
            ),
        ];
        cfg
    }

    #[test]
    fn cardinality() {
        let results = run_suite(&tiny(1)).unwrap();
        assert_eq!(results.len(), 2);
        assert!(results.iter().all(|r| r.solved() && r.wall_time_s > 0.0));
    }

    #[test]
    fn deterministic_apart_from_timing() {
        let strip = |rs: Vec<RunResult>| -> Vec<_> {
            rs.into_iter()
                .map(|r| (r.problem_id, r.solver, r.status, r.iterations))
                .collect()
        };
        let mut a = tiny(8);
        a.instances_per_cell = 3;
        let mut b = a.clone();
        b.sequential = true;
        assert_eq!(strip(run_suite(&a).unwrap()), strip(run_suite(&b).unwrap()));
    }

    #[test]
    fn default_solver_set() {
        let names: Vec<String> = default_solvers().into_iter().map(|s| s.name).collect();
        assert_eq!(
            names,
            ["PACA1", "PACA2", "SSPM1", "SSPM2", "MCSP1", "MCSP2", "CARMprod"]
        );
    }

    #[test]
    fn errors_become_rows() {
        let mut cfg = tiny(2);
        // A zero iteration budget is not an error; an infeasible budget still yields one row per cell.
        cfg.solvers[0].config.max_iter = 0;
        let rs = run_suite(&cfg).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].status, RunStatus::MaxIterReached);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = tiny(0);
        cfg.repetitions = 0;
        assert!(run_suite(&cfg).is_err());
        let mut cfg = tiny(0);
        cfg.solvers.clear();
        assert!(run_suite(&cfg).is_err());
        let mut cfg = tiny(0);
        cfg.solvers[1].name = "PACA2".into();
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn writes_results_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny(3);
        cfg.output_dir = Some(dir.path().to_path_buf());
        let rs = run_suite(&cfg).unwrap();
        assert_eq!(
            read_results_csv(&dir.path().join("results.csv")).unwrap(),
            rs
        );
    }
}
