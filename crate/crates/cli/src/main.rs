use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use feaskit_core::bench::{
    emit_profile_svg, performance_profile, read_results_csv, run_suite, summarize_stats,
    write_profile_csv, write_stats_csv, SolverStats, SuiteConfig, THREADS_ENV,
};
use feaskit_core::{
    check_equivalence, generate_ellipsoid_instance, read_instance, run, sample_infeasible_start,
    write_instance, Algorithm, GenParams, McspRelaxation, PerturbationSchedule, SolveReport,
    SolverConfig, TraceMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "feaskit",
    version,
    about = "Convex feasibility solvers and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random ellipsoid feasibility instance.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        /// Generator overrides, e.g. "eig_lo=0.5,eig_hi=4,c_lo=1,c_hi=2,b_scale=0.3".
        #[arg(long, value_parser = parse_params)]
        params: Option<GenParams>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance from an infeasible start and print the report as JSON.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_parser = parse_algorithm)]
        algorithm: Algorithm,
        /// "zero" or "powerlaw:nu=1,r=0.5". Ignored by carmprod, which always runs unperturbed.
        #[arg(long, value_parser = parse_schedule)]
        schedule: PerturbationSchedule,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Write the per-iteration trace as JSON to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Seed for the infeasible starting point.
        #[arg(long, default_value_t = 0)]
        x0_seed: u64,
        /// Use the 1/(k+1) relaxation for mcsp instead of 1.
        #[arg(long)]
        harmonic_relaxation: bool,
    },
    /// Run the benchmark suite and write results, stats and profiles to a directory.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
        #[arg(long)]
        instances: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Run every cell on one thread, for clean timings.
        #[arg(long)]
        sequential: bool,
        #[arg(long, env = THREADS_ENV)]
        threads: Option<usize>,
    },
    /// Build performance profiles from a results CSV.
    Profile {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out_svg: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
    },
    /// Check the direct iteration against its product-space form on random instances.
    #[command(hide = true)]
    VerifyEquivalence {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        iterations: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn parse_params(s: &str) -> Result<GenParams, String> {
    GenParams::parse(s).map_err(|e| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse::<Algorithm>().map_err(|e| e.to_string())
}

fn parse_schedule(s: &str) -> Result<PerturbationSchedule, String> {
    s.parse::<PerturbationSchedule>().map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    instance: &'a str,
    algorithm: Algorithm,
    schedule: PerturbationSchedule,
    #[serde(flatten)]
    report: &'a SolveReport,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn print_stats(stats: &[SolverStats]) {
    println!(
        "{:<10} {:>6} {:>6} {:>12} {:>12} {:>12} {:>12}",
        "solver", "ok", "failed", "mean_s", "median_s", "min_s", "max_s"
    );
    for s in stats {
        println!(
            "{:<10} {:>6} {:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            s.solver, s.completed, s.failed, s.mean, s.median, s.min, s.max
        );
    }
}

fn generate(n: usize, m: usize, seed: u64, params: Option<GenParams>, out: &Path) -> Result<()> {
    let inst = generate_ellipsoid_instance(n, m, seed, &params.unwrap_or_default())?;
    write_file(out, &write_instance(&inst)?)?;
    eprintln!("wrote {} to {}", inst.id(), out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    instance: &Path,
    algorithm: Algorithm,
    schedule: PerturbationSchedule,
    tol: Option<f64>,
    max_iter: Option<usize>,
    trace: Option<&Path>,
    x0_seed: u64,
    harmonic_relaxation: bool,
) -> Result<()> {
    let bytes = fs::read(instance).with_context(|| format!("reading {}", instance.display()))?;
    let inst = read_instance(&bytes).with_context(|| format!("parsing {}", instance.display()))?;
    let x0 = sample_infeasible_start(&inst, x0_seed)?;

    if algorithm == Algorithm::CarmProd && !schedule.is_zero() {
        eprintln!("note: carmprod ignores the schedule and runs with eps = 0");
    }
    let mut cfg = SolverConfig::new(algorithm, schedule);
    if let Some(t) = tol {
        cfg = cfg.with_tol(t);
    }
    if let Some(k) = max_iter {
        cfg = cfg.with_max_iter(k);
    }
    if harmonic_relaxation {
        cfg = cfg.with_mcsp_relaxation(McspRelaxation::Harmonic);
    }
    if trace.is_some() {
        cfg = cfg.with_trace(TraceMode::Full);
    }

    let mut report = run(&cfg, &inst, &x0)?;
    if let Some(path) = trace {
        let mut json = serde_json::to_vec_pretty(&report.trace)?;
        json.push(b'\n');
        write_file(path, &json)?;
        report.trace.clear();
    }
    let out = SolveOutput {
        instance: inst.id(),
        algorithm,
        schedule: cfg.schedule,
        report: &report,
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    serde_json::to_writer_pretty(&mut lock, &out)?;
    writeln!(lock)?;
    Ok(())
}

fn profile_outputs(
    results: &[feaskit_core::bench::RunResult],
    svg: &Path,
    csv: &Path,
) -> Result<()> {
    let curves = performance_profile(results)?;
    for p in [svg, csv] {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
    }
    write_profile_csv(&curves, csv)?;
    emit_profile_svg(&curves, svg)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench(
    dims: Vec<usize>,
    counts: Vec<usize>,
    instances: usize,
    reps: usize,
    seed: u64,
    out: &Path,
    sequential: bool,
    threads: Option<usize>,
) -> Result<()> {
    let mut cfg = SuiteConfig::new(dims, counts, instances, seed);
    cfg.repetitions = reps;
    cfg.sequential = sequential;
    cfg.threads = threads;
    cfg.output_dir = Some(out.to_path_buf());
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let results = run_suite(&cfg)?;
    let stats = summarize_stats(&results)?;
    write_stats_csv(&stats, &out.join("stats.csv"))?;
    profile_outputs(&results, &out.join("profile.svg"), &out.join("profile.csv"))?;
    print_stats(&stats);
    eprintln!("{} runs written to {}", results.len(), out.display());
    Ok(())
}

fn verify_equivalence(trials: usize, seed: u64, iterations: usize, tol: f64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for t in 0..trials {
        let n = rng.random_range(1..=10);
        let m = rng.random_range(1..=5);
        let inst = generate_ellipsoid_instance(n, m, rng.random(), &GenParams::default())?;
        let x0 = sample_infeasible_start(&inst, rng.random())?;
        let sched = if t % 2 == 0 {
            PerturbationSchedule::HARMONIC
        } else {
            PerturbationSchedule::INV_SQRT
        };
        let r = check_equivalence(&inst, &x0, &sched, iterations)
            .with_context(|| format!("trial {t} on {}", inst.id()))?;
        worst = worst.max(r.max_rel_error);
        if r.max_rel_error > tol {
            bail!(
                "trial {t} on {}: relative error {:.3e} exceeds {tol:e}",
                inst.id(),
                r.max_rel_error
            );
        }
    }
    println!("{trials} trials, max relative error {worst:.3e}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Generate {
            n,
            m,
            seed,
            params,
            out,
        } => generate(n, m, seed, params, &out),
        Command::Solve {
            instance,
            algorithm,
            schedule,
            tol,
            max_iter,
            trace,
            x0_seed,
            harmonic_relaxation,
        } => solve(
            &instance,
            algorithm,
            schedule,
            tol,
            max_iter,
            trace.as_deref(),
            x0_seed,
            harmonic_relaxation,
        ),
        Command::Bench {
            dims,
            counts,
            instances,
            reps,
            seed,
            out,
            sequential,
            threads,
        } => bench(
            dims, counts, instances, reps, seed, &out, sequential, threads,
        ),
        Command::Profile {
            results,
            out_svg,
            out_csv,
        } => read_results_csv(&results)
            .map_err(anyhow::Error::from)
            .and_then(|r| profile_outputs(&r, &out_svg, &out_csv)),
        Command::VerifyEquivalence {
            trials,
            seed,
            iterations,
            tol,
        } => verify_equivalence(trials, seed, iterations, tol),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
