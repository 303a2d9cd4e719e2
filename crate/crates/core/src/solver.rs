//! PACA and the comparison methods behind one configuration type.
//!
//! Every method works from the same per-constraint displacement
//!
//! ```text
//! v_i = max(0, f_i(x) + eps) / |u_i|^2 * u_i,     u_i a subgradient of f_i at x
//! ```
//!
//! which is `x` minus its projection onto the perturbed separating halfspace
//! `{y : u_iᵀ(y - x) + f_i(x) + eps <= 0}`. With `w = mean(v_i)`:
//!
//! * PACA steps `x - alpha w`, `alpha = mean(|v_i|^2) / |w|^2 >= 1`,
//! * SSPM steps `x - w`,
//! * MCSP steps `x - lambda v_{k mod m}`,
//! * CARMprod is the circumcentered-reflection method on the product space
//!   with `eps = 0` (see [`crate::product`]).

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, FeasError, Result};
use crate::geometry::{dot, norm_sq};
use crate::model::{CfpInstance, ConvexInequalityOracle};
use crate::product::{BlockVector, ProductCrm};
use crate::schedule::PerturbationSchedule;

/// Relative threshold `eta` for treating `w` as zero: `|w| <= eta * max_i |v_i|`.
pub const DEFAULT_ZERO_W_THRESHOLD: f64 = 1e-14;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Feasibility tolerance used when the schedule cannot give finite termination.
pub const ASYMPTOTIC_FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Paca,
    Sspm,
    Mcsp,
    #[serde(rename = "carmprod")]
    CarmProd,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Paca => "paca",
            Algorithm::Sspm => "sspm",
            Algorithm::Mcsp => "mcsp",
            Algorithm::CarmProd => "carmprod",
        })
    }
}

impl FromStr for Algorithm {
    type Err = FeasError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paca" => Ok(Algorithm::Paca),
            "sspm" => Ok(Algorithm::Sspm),
            "mcsp" => Ok(Algorithm::Mcsp),
            "carmprod" | "carm" => Ok(Algorithm::CarmProd),
            other => Err(FeasError::InvalidParams(format!(
                "unknown algorithm {other:?}"
            ))),
        }
    }
}

/// Step length of the cyclic method.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum McspRelaxation {
    Constant {
        value: f64,
    },
    /// `1 / (k + 1)`.
    Harmonic,
}

impl McspRelaxation {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            McspRelaxation::Constant { value } => value,
            McspRelaxation::Harmonic => 1.0 / (k as f64 + 1.0),
        }
    }
}

impl Default for McspRelaxation {
    fn default() -> Self {
        McspRelaxation::Constant { value: 1.0 }
    }
}

/// How much of each iteration to keep in [`SolveReport::trace`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceMode {
    #[default]
    Off,
    /// Scalars only (eps, alpha, step norm, violation).
    Summary,
    /// Scalars plus iterates and displacement vectors.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub schedule: PerturbationSchedule,
    pub feasibility_tol: f64,
    pub max_iter: usize,
    pub zero_w_threshold: f64,
    pub mcsp_relaxation: McspRelaxation,
    pub trace: TraceMode,
}

impl SolverConfig {
    /// Defaults: tolerance 0 for divergent schedules (finite termination is
    /// expected), 1e-6 otherwise. CARMprod always runs unperturbed.
    pub fn new(algorithm: Algorithm, schedule: PerturbationSchedule) -> Self {
        let schedule = if algorithm == Algorithm::CarmProd {
            PerturbationSchedule::Zero
        } else {
            schedule
        };
        let feasibility_tol = if schedule.is_divergent() {
            0.0
        } else {
            ASYMPTOTIC_FEASIBILITY_TOL
        };
        Self {
            algorithm,
            schedule,
            feasibility_tol,
            max_iter: DEFAULT_MAX_ITER,
            zero_w_threshold: DEFAULT_ZERO_W_THRESHOLD,
            mcsp_relaxation: McspRelaxation::default(),
            trace: TraceMode::Off,
        }
    }

    pub fn carm_prod() -> Self {
        Self::new(Algorithm::CarmProd, PerturbationSchedule::Zero)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.feasibility_tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_trace(mut self, trace: TraceMode) -> Self {
        self.trace = trace;
        self
    }

    pub fn with_mcsp_relaxation(mut self, relaxation: McspRelaxation) -> Self {
        self.mcsp_relaxation = relaxation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.feasibility_tol >= 0.0) {
            return Err(FeasError::InvalidParams(format!(
                "feasibility tolerance must be >= 0, got {}",
                self.feasibility_tol
            )));
        }
        if !(self.zero_w_threshold >= 0.0) {
            return Err(FeasError::InvalidParams(
                "zero-w threshold must be >= 0".into(),
            ));
        }
        if self.algorithm == Algorithm::CarmProd && !self.schedule.is_zero() {
            return Err(FeasError::InvalidParams(
                "carmprod runs with the zero schedule only".into(),
            ));
        }
        if let McspRelaxation::Constant { value } = self.mcsp_relaxation {
            if !(value > 0.0 && value < 2.0) {
                return Err(FeasError::InvalidParams(format!(
                    "mcsp relaxation must lie in (0, 2), got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// One iteration of a solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    pub epsilon: f64,
    /// `max_i f_i(x^k)`, before stepping.
    pub max_violation: f64,
    /// Constraint used by the cyclic method.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub active_set: Option<usize>,
    /// `x^k`; kept in full traces only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub point: Vec<f64>,
    /// Displacements `v_i` (only the active one for MCSP); full traces only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub displacements: Vec<Vec<f64>>,
    /// `w = mean(v_i)`; full traces only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w: Vec<f64>,
    pub w_norm: f64,
    /// Extrapolation factor; absent when `w` was treated as zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub step_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    FeasibleExact,
    FeasibleWithinTol,
    MaxIterReached,
}

impl SolveStatus {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, SolveStatus::MaxIterReached)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub final_point: Vec<f64>,
    pub final_max_violation: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<StepRecord>,
}

impl SolveReport {
    pub fn wall_time(&self) -> Duration {
        Duration::from_secs_f64(self.wall_time_s)
    }
}

/// Per-constraint values and subgradients at one point.
struct Evaluation {
    values: Vec<f64>,
    // row i holds the subgradient of constraint i
    grads: Vec<f64>,
}

impl Evaluation {
    fn new(n: usize, m: usize) -> Self {
        Self {
            values: vec![0.0; m],
            grads: vec![0.0; n * m],
        }
    }

    fn fill(&mut self, inst: &CfpInstance, x: &[f64]) {
        let n = inst.dim();
        for (i, c) in inst.constraints().iter().enumerate() {
            self.values[i] = c.value_and_subgradient(x, &mut self.grads[i * n..(i + 1) * n]);
        }
    }

    fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Writes `v_i` into `out` and returns `|v_i|^2`.
fn displacement(index: usize, value: f64, grad: &[f64], eps: f64, out: &mut [f64]) -> Result<f64> {
    let excess = value + eps;
    if !(excess > 0.0) {
        out.fill(0.0);
        return Ok(0.0);
    }
    let gn2 = norm_sq(grad);
    if !(gn2 > 0.0) {
        return Err(FeasError::ZeroSubgradientAtViolation { index });
    }
    let coef = excess / gn2;
    for (o, g) in out.iter_mut().zip(grad) {
        *o = coef * g;
    }
    Ok(norm_sq(out))
}

/// Scratch space for the direct (non product-space) steps.
struct Kernel {
    n: usize,
    m: usize,
    eval: Evaluation,
    v: Vec<f64>,
    v_norm_sq: Vec<f64>,
    w: Vec<f64>,
}

struct StepOutcome {
    w_norm: f64,
    alpha: Option<f64>,
    active: Option<usize>,
}

#[derive(Clone, Copy, PartialEq)]
enum Simultaneous {
    Extrapolated,
    Plain,
}

impl Kernel {
    fn new(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            eval: Evaluation::new(n, m),
            v: vec![0.0; n * m],
            v_norm_sq: vec![0.0; m],
            w: vec![0.0; n],
        }
    }

    /// PACA (`Extrapolated`) or SSPM (`Plain`) from the current evaluation.
    fn simultaneous(
        &mut self,
        x: &[f64],
        eps: f64,
        eta: f64,
        mode: Simultaneous,
        next: &mut [f64],
    ) -> Result<StepOutcome> {
        let (n, m) = (self.n, self.m);
        self.w.fill(0.0);
        let mut sum_v2 = 0.0;
        let mut max_v2 = 0.0f64;
        for i in 0..m {
            let vi = &mut self.v[i * n..(i + 1) * n];
            let v2 = displacement(
                i,
                self.eval.values[i],
                &self.eval.grads[i * n..(i + 1) * n],
                eps,
                vi,
            )?;
            self.v_norm_sq[i] = v2;
            if v2 > 0.0 {
                for (wj, vj) in self.w.iter_mut().zip(vi.iter()) {
                    *wj += vj;
                }
            }
            sum_v2 += v2;
            max_v2 = max_v2.max(v2);
        }
        let inv_m = 1.0 / m as f64;
        self.w.iter_mut().for_each(|wj| *wj *= inv_m);
        let w2 = norm_sq(&self.w);
        let w_norm = w2.sqrt();

        if max_v2 == 0.0 || w_norm <= eta * max_v2.sqrt() {
            next.copy_from_slice(x);
            return Ok(StepOutcome {
                w_norm,
                alpha: None,
                active: None,
            });
        }
        let alpha = match mode {
            Simultaneous::Extrapolated => (sum_v2 * inv_m) / w2,
            Simultaneous::Plain => 1.0,
        };
        for ((o, xj), wj) in next.iter_mut().zip(x).zip(&self.w) {
            *o = xj - alpha * wj;
        }
        Ok(StepOutcome {
            w_norm,
            alpha: Some(alpha),
            active: None,
        })
    }

    fn cyclic(
        &mut self,
        x: &[f64],
        eps: f64,
        k: usize,
        relaxation: f64,
        next: &mut [f64],
    ) -> Result<StepOutcome> {
        let n = self.n;
        let i = k % self.m;
        let vi = &mut self.v[..n];
        let v2 = displacement(
            i,
            self.eval.values[i],
            &self.eval.grads[i * n..(i + 1) * n],
            eps,
            vi,
        )?;
        self.v_norm_sq[0] = v2;
        for ((o, xj), vj) in next.iter_mut().zip(x).zip(vi.iter()) {
            *o = xj - relaxation * vj;
        }
        Ok(StepOutcome {
            w_norm: v2.sqrt(),
            alpha: None,
            active: Some(i),
        })
    }

    fn record(
        &self,
        k: usize,
        eps: f64,
        x: &[f64],
        next: &[f64],
        out: &StepOutcome,
        full: bool,
    ) -> StepRecord {
        let step_norm = x
            .iter()
            .zip(next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let (point, displacements, w) = if full {
            let n = self.n;
            let displacements = match out.active {
                Some(_) => vec![self.v[..n].to_vec()],
                None => self.v.chunks(n).map(<[f64]>::to_vec).collect(),
            };
            let w = if out.active.is_some() {
                Vec::new()
            } else {
                self.w.clone()
            };
            (x.to_vec(), displacements, w)
        } else {
            (Vec::new(), Vec::new(), Vec::new())
        };
        StepRecord {
            k,
            epsilon: eps,
            max_violation: self.eval.max_value(),
            active_set: out.active,
            point,
            displacements,
            w,
            w_norm: out.w_norm,
            alpha: out.alpha,
            step_norm,
        }
    }
}

fn single_step(
    inst: &CfpInstance,
    x: &[f64],
    eps: f64,
    step: impl FnOnce(&mut Kernel, &mut [f64]) -> Result<StepOutcome>,
) -> Result<(Vec<f64>, StepRecord)> {
    check_dim(inst.dim(), x.len())?;
    if !(eps >= 0.0) {
        return Err(FeasError::InvalidParams(format!(
            "perturbation must be >= 0, got {eps}"
        )));
    }
    let mut kernel = Kernel::new(inst.dim(), inst.len());
    kernel.eval.fill(inst, x);
    let mut next = vec![0.0; inst.dim()];
    let out = step(&mut kernel, &mut next)?;
    let rec = kernel.record(0, eps, x, &next, &out, true);
    Ok((next, rec))
}

/// One PACA iteration from `x` with perturbation `eps`.
pub fn paca_step(inst: &CfpInstance, x: &[f64], eps: f64) -> Result<(Vec<f64>, StepRecord)> {
    paca_step_with_threshold(inst, x, eps, DEFAULT_ZERO_W_THRESHOLD)
}

pub fn paca_step_with_threshold(
    inst: &CfpInstance,
    x: &[f64],
    eps: f64,
    eta: f64,
) -> Result<(Vec<f64>, StepRecord)> {
    single_step(inst, x, eps, |k, next| {
        k.simultaneous(x, eps, eta, Simultaneous::Extrapolated, next)
    })
}

/// One SSPM iteration: PACA without extrapolation.
pub fn simultaneous_step(
    inst: &CfpInstance,
    x: &[f64],
    eps: f64,
) -> Result<(Vec<f64>, StepRecord)> {
    single_step(inst, x, eps, |k, next| {
        k.simultaneous(x, eps, DEFAULT_ZERO_W_THRESHOLD, Simultaneous::Plain, next)
    })
}

/// One MCSP iteration on constraint `k mod m` with step length `relaxation`.
pub fn cyclic_step(
    inst: &CfpInstance,
    x: &[f64],
    eps: f64,
    k: usize,
    relaxation: f64,
) -> Result<(Vec<f64>, StepRecord)> {
    single_step(inst, x, eps, |ker, next| {
        ker.cyclic(x, eps, k, relaxation, next)
    })
    .map(|(p, mut r)| {
        r.k = k;
        (p, r)
    })
}

/// Runs the configured method from `x0`.
///
/// Feasibility of `x^k` is tested before each step, so a feasible start
/// returns after zero iterations. A run ends `FeasibleExact` when
/// `max_i f_i(x^k) <= 0`, `FeasibleWithinTol` when it is only within
/// `feasibility_tol`, and `MaxIterReached` after `max_iter` steps.
pub fn run(cfg: &SolverConfig, inst: &CfpInstance, x0: &[f64]) -> Result<SolveReport> {
    check_dim(inst.dim(), x0.len())?;
    cfg.validate()?;
    let start = Instant::now();
    let mut report = match cfg.algorithm {
        Algorithm::CarmProd => run_product(cfg, inst, x0)?,
        _ => run_direct(cfg, inst, x0)?,
    };
    report.wall_time_s = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
    Ok(report)
}

fn status_for(max_violation: f64, tol: f64) -> Option<SolveStatus> {
    if max_violation <= 0.0 {
        Some(SolveStatus::FeasibleExact)
    } else if max_violation <= tol {
        Some(SolveStatus::FeasibleWithinTol)
    } else {
        None
    }
}

fn run_direct(cfg: &SolverConfig, inst: &CfpInstance, x0: &[f64]) -> Result<SolveReport> {
    let (n, m) = (inst.dim(), inst.len());
    let mut kernel = Kernel::new(n, m);
    let mut x = x0.to_vec();
    let mut next = vec![0.0; n];
    let mut trace = Vec::new();
    let mut k = 0usize;
    loop {
        kernel.eval.fill(inst, &x);
        let viol = kernel.eval.max_value();
        let status = status_for(viol, cfg.feasibility_tol)
            .or((k >= cfg.max_iter).then_some(SolveStatus::MaxIterReached));
        if let Some(status) = status {
            return Ok(SolveReport {
                status,
                iterations: k,
                wall_time_s: 0.0,
                final_point: x,
                final_max_violation: viol,
                trace,
            });
        }
        let eps = cfg.schedule.epsilon(k);
        let out = match cfg.algorithm {
            Algorithm::Paca => kernel.simultaneous(
                &x,
                eps,
                cfg.zero_w_threshold,
                Simultaneous::Extrapolated,
                &mut next,
            )?,
            Algorithm::Sspm => kernel.simultaneous(
                &x,
                eps,
                cfg.zero_w_threshold,
                Simultaneous::Plain,
                &mut next,
            )?,
            Algorithm::Mcsp => kernel.cyclic(&x, eps, k, cfg.mcsp_relaxation.at(k), &mut next)?,
            Algorithm::CarmProd => unreachable!("product-space runs are dispatched separately"),
        };
        if cfg.trace != TraceMode::Off {
            trace.push(kernel.record(k, eps, &x, &next, &out, cfg.trace == TraceMode::Full));
        }
        std::mem::swap(&mut x, &mut next);
        k += 1;
    }
}

fn run_product(cfg: &SolverConfig, inst: &CfpInstance, x0: &[f64]) -> Result<SolveReport> {
    let mut crm = ProductCrm::new(inst);
    let mut xb = BlockVector::diagonal(x0, inst.len());
    let mut trace = Vec::new();
    let mut k = 0usize;
    loop {
        let x = xb.mean_block();
        let viol = crm.evaluate(&x);
        let status = status_for(viol, cfg.feasibility_tol)
            .or((k >= cfg.max_iter).then_some(SolveStatus::MaxIterReached));
        if let Some(status) = status {
            return Ok(SolveReport {
                status,
                iterations: k,
                wall_time_s: 0.0,
                final_point: x,
                final_max_violation: viol,
                trace,
            });
        }
        let eps = cfg.schedule.epsilon(k);
        let next = crm.step(&xb, eps)?;
        if cfg.trace != TraceMode::Off {
            let step_norm = crate::geometry::distance(&next.mean_block(), &x);
            trace.push(StepRecord {
                k,
                epsilon: eps,
                max_violation: viol,
                active_set: None,
                point: if cfg.trace == TraceMode::Full {
                    x.clone()
                } else {
                    Vec::new()
                },
                displacements: Vec::new(),
                w: Vec::new(),
                w_norm: f64::NAN,
                alpha: None,
                step_norm,
            });
        }
        xb = next;
        k += 1;
    }
}

/// Step-wise driver with the same update rules as [`run`], for callers
/// that need to interleave their own logic between iterations.
pub struct Iteration<'a> {
    cfg: &'a SolverConfig,
    inst: &'a CfpInstance,
    kernel: Kernel,
    x: Vec<f64>,
    k: usize,
}

impl<'a> Iteration<'a> {
    pub fn new(cfg: &'a SolverConfig, inst: &'a CfpInstance, x0: &[f64]) -> Result<Self> {
        check_dim(inst.dim(), x0.len())?;
        cfg.validate()?;
        if cfg.algorithm == Algorithm::CarmProd {
            return Err(FeasError::InvalidParams(
                "step-wise iteration covers the direct methods only".into(),
            ));
        }
        Ok(Self {
            cfg,
            inst,
            kernel: Kernel::new(inst.dim(), inst.len()),
            x: x0.to_vec(),
            k: 0,
        })
    }

    pub fn point(&self) -> &[f64] {
        &self.x
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Feasibility status of the current iterate, if it stops the run.
    pub fn stop_status(&self) -> Option<SolveStatus> {
        status_for(
            self.inst.max_violation_unchecked(&self.x),
            self.cfg.feasibility_tol,
        )
    }

    /// Advances one step and returns its full record.
    pub fn advance(&mut self) -> Result<StepRecord> {
        self.kernel.eval.fill(self.inst, &self.x);
        let eps = self.cfg.schedule.epsilon(self.k);
        let mut next = vec![0.0; self.inst.dim()];
        let eta = self.cfg.zero_w_threshold;
        let out = match self.cfg.algorithm {
            Algorithm::Paca => self.kernel.simultaneous(
                &self.x,
                eps,
                eta,
                Simultaneous::Extrapolated,
                &mut next,
            )?,
            Algorithm::Sspm => {
                self.kernel
                    .simultaneous(&self.x, eps, eta, Simultaneous::Plain, &mut next)?
            }
            Algorithm::Mcsp => self.kernel.cyclic(
                &self.x,
                eps,
                self.k,
                self.cfg.mcsp_relaxation.at(self.k),
                &mut next,
            )?,
            Algorithm::CarmProd => unreachable!(),
        };
        let rec = self.kernel.record(self.k, eps, &self.x, &next, &out, true);
        self.x = next;
        self.k += 1;
        Ok(rec)
    }
}

/// Checks the Fejér descent inequality
/// `|x^{k+1} - s|^2 <= |x^k - s|^2 - |x^{k+1} - x^k|^2` along a full trace,
/// from step `from` onward, for the anchor `s`. Returns the worst violation
/// relative to `max(1, |x^k - s|^2)`.
pub fn fejer_defect(trace: &[StepRecord], final_point: &[f64], anchor: &[f64], from: usize) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for (i, rec) in trace.iter().enumerate() {
        if rec.k < from || rec.point.is_empty() {
            continue;
        }
        let next = trace.get(i + 1).map_or(final_point, |r| r.point.as_slice());
        let d0: f64 = rec
            .point
            .iter()
            .zip(anchor)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let d1: f64 = next
            .iter()
            .zip(anchor)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let step: f64 = next
            .iter()
            .zip(&rec.point)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let defect = (d1 - (d0 - step)) / d0.max(1.0);
        worst = worst.max(defect);
    }
    worst
}

/// `u(x)ᵀ(z - x) + f(x) + eps`: the perturbed separating-halfspace value at `z`.
pub fn separating_value<O: ConvexInequalityOracle + ?Sized>(
    oracle: &O,
    x: &[f64],
    z: &[f64],
    eps: f64,
) -> f64 {
    let mut g = vec![0.0; oracle.dim()];
    let f = oracle.value_and_subgradient(x, &mut g);
    let diff: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
    dot(&g, &diff) + f + eps
}
