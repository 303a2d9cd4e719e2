//! Convex-inequality oracles and feasibility instances.
//!
//! A constraint is a convex function `f_i` with feasible set `{x : f_i(x) <= 0}`.
//! Solvers only ever see `f_i(x)` and one subgradient at `x`, through
//! [`ConvexInequalityOracle`].

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, FeasError, Result};
use crate::geometry::{dot, norm};

/// Schema tag written into every instance file.
pub const INSTANCE_SCHEMA: &str = "cfp-ellipsoids-v1";

/// Relative symmetry tolerance for ellipsoid matrices.
pub const SYMMETRY_REL_TOL: f64 = 1e-12;

/// Number of radius doublings tried by [`sample_infeasible_start`].
pub const MAX_ESCAPE_DOUBLINGS: u32 = 60;

/// A convex function evaluated through its value and one subgradient.
pub trait ConvexInequalityOracle: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes one element of the subdifferential at `x` into `out`.
    fn subgradient_into(&self, x: &[f64], out: &mut [f64]);

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.subgradient_into(x, &mut out);
        out
    }

    /// Value and subgradient together; implementations override this when
    /// the two share work.
    fn value_and_subgradient(&self, x: &[f64], out: &mut [f64]) -> f64 {
        self.subgradient_into(x, out);
        self.value(x)
    }
}

/// `f(x) = xᵀAx + 2xᵀb - c` with `A` symmetric positive definite and `c > 0`.
#[derive(Clone, PartialEq)]
pub struct Ellipsoid {
    n: usize,
    // row-major n*n
    a: Vec<f64>,
    b: Vec<f64>,
    c: f64,
}

impl fmt::Debug for Ellipsoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ellipsoid")
            .field("n", &self.n)
            .field("c", &self.c)
            .finish_non_exhaustive()
    }
}

impl Ellipsoid {
    /// Builds an ellipsoid from a row-major matrix, checking symmetry,
    /// positive definiteness (by Cholesky) and `c > 0`.
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: f64) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(FeasError::InvalidEllipsoid(
                "dimension must be positive".into(),
            ));
        }
        if a.len() != n * n {
            return Err(FeasError::InvalidEllipsoid(format!(
                "matrix has {} entries, expected {}",
                a.len(),
                n * n
            )));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) || !c.is_finite() {
            return Err(FeasError::InvalidEllipsoid("non-finite entry".into()));
        }
        if !(c > 0.0) {
            return Err(FeasError::InvalidEllipsoid(format!(
                "c must be positive, got {c}"
            )));
        }
        let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for i in 0..n {
            for j in (i + 1)..n {
                let (aij, aji) = (a[i * n + j], a[j * n + i]);
                if (aij - aji).abs() > SYMMETRY_REL_TOL * scale {
                    return Err(FeasError::InvalidEllipsoid(format!(
                        "matrix is not symmetric at ({i}, {j}): {aij} vs {aji}"
                    )));
                }
            }
        }
        let m = DMatrix::from_row_slice(n, n, &a);
        if m.cholesky().is_none() {
            return Err(FeasError::InvalidEllipsoid(
                "matrix is not positive definite".into(),
            ));
        }
        Ok(Self { n, a, b, c })
    }

    /// Row-major matrix entries.
    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn linear(&self) -> &[f64] {
        &self.b
    }

    pub fn constant(&self) -> f64 {
        self.c
    }
}

impl ConvexInequalityOracle for Ellipsoid {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        let quad: f64 = (0..self.n).map(|i| x[i] * dot(self.row(i), x)).sum();
        quad + 2.0 * dot(x, &self.b) - self.c
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = 2.0 * (dot(self.row(i), x) + self.b[i]);
        }
    }

    fn value_and_subgradient(&self, x: &[f64], out: &mut [f64]) -> f64 {
        // With g = Ax + b: f = xᵀg + xᵀb - c and the gradient is 2g.
        let mut xg = 0.0;
        let mut xb = 0.0;
        for i in 0..self.n {
            let gi = dot(self.row(i), x) + self.b[i];
            xg += x[i] * gi;
            xb += x[i] * self.b[i];
            out[i] = 2.0 * gi;
        }
        xg + xb - self.c
    }
}

/// `f(x) = aᵀx - beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Affine {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }
}

impl ConvexInequalityOracle for Affine {
    fn dim(&self) -> usize {
        self.normal.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    fn subgradient_into(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.normal);
    }
}

/// One constraint of an instance.
#[derive(Clone, Debug)]
pub enum Constraint {
    Ellipsoid(Ellipsoid),
    Affine(Affine),
    Custom(Arc<dyn ConvexInequalityOracle>),
}

impl Constraint {
    fn kind(&self) -> &'static str {
        match self {
            Constraint::Ellipsoid(_) => "ellipsoid",
            Constraint::Affine(_) => "affine",
            Constraint::Custom(_) => "custom",
        }
    }
}

impl ConvexInequalityOracle for Constraint {
    fn dim(&self) -> usize {
        match self {
            Constraint::Ellipsoid(e) => e.dim(),
            Constraint::Affine(a) => a.dim(),
            Constraint::Custom(o) => o.dim(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Constraint::Ellipsoid(e) => e.value(x),
            Constraint::Affine(a) => a.value(x),
            Constraint::Custom(o) => o.value(x),
        }
    }

    fn subgradient_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Constraint::Ellipsoid(e) => e.subgradient_into(x, out),
            Constraint::Affine(a) => a.subgradient_into(x, out),
            Constraint::Custom(o) => o.subgradient_into(x, out),
        }
    }

    fn value_and_subgradient(&self, x: &[f64], out: &mut [f64]) -> f64 {
        match self {
            Constraint::Ellipsoid(e) => e.value_and_subgradient(x, out),
            Constraint::Affine(a) => a.value_and_subgradient(x, out),
            Constraint::Custom(o) => o.value_and_subgradient(x, out),
        }
    }
}

impl From<Ellipsoid> for Constraint {
    fn from(e: Ellipsoid) -> Self {
        Constraint::Ellipsoid(e)
    }
}

impl From<Affine> for Constraint {
    fn from(a: Affine) -> Self {
        Constraint::Affine(a)
    }
}

/// A convex feasibility problem: find `x` with `f_i(x) <= 0` for every constraint.
#[derive(Clone, Debug)]
pub struct CfpInstance {
    id: String,
    n: usize,
    constraints: Vec<Constraint>,
    slater: Option<SlaterPoint>,
}

/// A point strictly inside every constraint, with its margin `min_i -f_i(point)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlaterPoint {
    pub point: Vec<f64>,
    pub margin: f64,
}

impl CfpInstance {
    pub fn new(id: impl Into<String>, n: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if n == 0 {
            return Err(FeasError::InvalidParams(
                "dimension must be positive".into(),
            ));
        }
        if constraints.is_empty() {
            return Err(FeasError::EmptyInstance);
        }
        for c in &constraints {
            check_dim(n, c.dim())?;
        }
        Ok(Self {
            id: id.into(),
            n,
            constraints,
            slater: None,
        })
    }

    /// Attaches a Slater point, certifying that every constraint is strictly
    /// satisfied there.
    pub fn with_slater_point(mut self, point: Vec<f64>) -> Result<Self> {
        check_dim(self.n, point.len())?;
        let margin = -self.max_violation(&point)?;
        if !(margin > 0.0) {
            return Err(FeasError::InvalidParams(format!(
                "point is not a Slater point (max violation {})",
                -margin
            )));
        }
        self.slater = Some(SlaterPoint { point, margin });
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn slater(&self) -> Option<&SlaterPoint> {
        self.slater.as_ref()
    }

    /// `max_i f_i(x)`; `x` is feasible iff this is `<= 0`.
    pub fn max_violation(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n, x.len())?;
        Ok(self.max_violation_unchecked(x))
    }

    pub(crate) fn max_violation_unchecked(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.value(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> Result<bool> {
        if !(tol >= 0.0) {
            return Err(FeasError::InvalidParams(format!(
                "tolerance must be >= 0, got {tol}"
            )));
        }
        Ok(self.max_violation(x)? <= tol)
    }
}

/// Free function form of [`CfpInstance::max_violation`].
pub fn max_violation(inst: &CfpInstance, x: &[f64]) -> Result<f64> {
    inst.max_violation(x)
}

/// Free function form of [`CfpInstance::is_feasible`].
pub fn is_feasible(inst: &CfpInstance, x: &[f64], tol: f64) -> Result<bool> {
    inst.is_feasible(x, tol)
}

/// Parameters of the random ellipsoid generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub eig_lo: f64,
    pub eig_hi: f64,
    /// Scale of the Gaussian linear terms; `None` means `1/sqrt(n)`.
    pub b_scale: Option<f64>,
    pub c_lo: f64,
    pub c_hi: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            eig_lo: 0.5,
            eig_hi: 2.0,
            b_scale: None,
            c_lo: 1.0,
            c_hi: 2.0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FeasError::InvalidParams(msg));
        if !(self.eig_lo > 0.0 && self.eig_hi >= self.eig_lo && self.eig_hi.is_finite()) {
            return bad(format!(
                "eigenvalue range must satisfy 0 < eig_lo <= eig_hi, got [{}, {}]",
                self.eig_lo, self.eig_hi
            ));
        }
        if let Some(s) = self.b_scale {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!(
                    "b_scale must be a finite nonnegative number, got {s}"
                ));
            }
        }
        if !(self.c_lo > 0.0 && self.c_hi >= self.c_lo && self.c_hi.is_finite()) {
            return bad(format!(
                "c range must satisfy 0 < c_lo <= c_hi, got [{}, {}]",
                self.c_lo, self.c_hi
            ));
        }
        Ok(())
    }

    /// Parses `key=value` pairs separated by commas, e.g. `eig_lo=0.1,c_hi=3`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut p = Self::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                FeasError::InvalidParams(format!("expected key=value, got {item:?}"))
            })?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| FeasError::InvalidParams(format!("bad number in {item:?}")))?;
            match key.trim() {
                "eig_lo" => p.eig_lo = v,
                "eig_hi" => p.eig_hi = v,
                "b_scale" => p.b_scale = Some(v),
                "c_lo" => p.c_lo = v,
                "c_hi" => p.c_hi = v,
                other => {
                    return Err(FeasError::InvalidParams(format!(
                        "unknown parameter {other:?}"
                    )))
                }
            }
        }
        p.validate()?;
        Ok(p)
    }
}

/// Generates `m` random ellipsoids in `R^n` that all contain the origin
/// strictly: `f_i(0) = -c_i < 0`.
///
/// Each `A_i = Q Λ Qᵀ` with `Q` the orthogonal QR factor of a Gaussian matrix
/// and `Λ` log-uniform in `[eig_lo, eig_hi]`. The stream comes from
/// ChaCha8 seeded with `seed`, so output is identical across platforms.
pub fn generate_ellipsoid_instance(
    n: usize,
    m: usize,
    seed: u64,
    params: &GenParams,
) -> Result<CfpInstance> {
    if n == 0 || m == 0 {
        return Err(FeasError::InvalidParams(format!(
            "need n >= 1 and m >= 1, got n={n}, m={m}"
        )));
    }
    params.validate()?;
    let b_scale = params.b_scale.unwrap_or(1.0 / (n as f64).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (log_lo, log_hi) = (params.eig_lo.ln(), params.eig_hi.ln());

    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let gauss: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
        let q = DMatrix::from_row_slice(n, n, &gauss).qr().q();
        let eig: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                (log_lo + u * (log_hi - log_lo)).exp()
            })
            .collect();
        let lambda = DMatrix::from_diagonal(&DVector::from_vec(eig));
        let a = &q * lambda * q.transpose();
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                rows[i * n + j] = 0.5 * (a[(i, j)] + a[(j, i)]);
            }
        }
        let b: Vec<f64> = (0..n)
            .map(|_| b_scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let c = params.c_lo + rng.random::<f64>() * (params.c_hi - params.c_lo);
        constraints.push(Constraint::Ellipsoid(Ellipsoid::new(rows, b, c)?));
    }
    CfpInstance::new(format!("ell-n{n}-m{m}-s{seed}"), n, constraints)?
        .with_slater_point(vec![0.0; n])
}

/// A deterministic infeasible starting point: a Gaussian direction from the
/// Slater point, pushed out by doubling radii (1, 2, 4, ...) until some
/// constraint is violated.
pub fn sample_infeasible_start(inst: &CfpInstance, seed: u64) -> Result<Vec<f64>> {
    let slater = inst.slater().ok_or(FeasError::MissingSlaterPoint)?;
    let n = inst.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut len = norm(&dir);
    while !(len > 0.0) {
        dir = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        len = norm(&dir);
    }
    dir.iter_mut().for_each(|d| *d /= len);

    let mut radius = 1.0f64;
    for _ in 0..=MAX_ESCAPE_DOUBLINGS {
        let x: Vec<f64> = slater
            .point
            .iter()
            .zip(&dir)
            .map(|(s, d)| s + radius * d)
            .collect();
        if inst.max_violation_unchecked(&x) > 0.0 {
            return Ok(x);
        }
        radius *= 2.0;
    }
    Err(FeasError::CannotEscape {
        doublings: MAX_ESCAPE_DOUBLINGS,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    n: usize,
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slater_point: Option<Vec<f64>>,
    ellipsoids: Vec<EllipsoidFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipsoidFile {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: f64,
}

/// Serializes an ellipsoid instance to the `cfp-ellipsoids-v1` JSON format.
pub fn write_instance(inst: &CfpInstance) -> Result<Vec<u8>> {
    let n = inst.dim();
    let ellipsoids = inst
        .constraints()
        .iter()
        .enumerate()
        .map(|(i, c)| match c {
            Constraint::Ellipsoid(e) => Ok(EllipsoidFile {
                a: (0..n).map(|r| e.row(r).to_vec()).collect(),
                b: e.linear().to_vec(),
                c: e.constant(),
            }),
            other => Err(FeasError::Unserializable(format!(
                "constraint {i} is {}, only ellipsoids can be written",
                other.kind()
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    let file = InstanceFile {
        schema: INSTANCE_SCHEMA.to_string(),
        id: Some(inst.id().to_string()),
        n,
        m: inst.len(),
        slater_point: inst.slater().map(|s| s.point.clone()),
        ellipsoids,
    };
    let mut out = serde_json::to_vec_pretty(&file)?;
    out.push(b'\n');
    Ok(out)
}

/// Parses and validates a `cfp-ellipsoids-v1` document.
pub fn read_instance(bytes: &[u8]) -> Result<CfpInstance> {
    let file: InstanceFile = serde_json::from_slice(bytes).map_err(|e| {
        FeasError::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    if file.schema != INSTANCE_SCHEMA {
        return Err(FeasError::parse(
            "schema",
            format!("expected {INSTANCE_SCHEMA:?}, got {:?}", file.schema),
        ));
    }
    let n = file.n;
    if n == 0 {
        return Err(FeasError::parse("n", "dimension must be positive"));
    }
    if file.m != file.ellipsoids.len() {
        return Err(FeasError::parse(
            "m",
            format!(
                "declares {} ellipsoids but {} are present",
                file.m,
                file.ellipsoids.len()
            ),
        ));
    }
    if file.m == 0 {
        return Err(FeasError::parse(
            "ellipsoids",
            "at least one ellipsoid is required",
        ));
    }
    let mut constraints = Vec::with_capacity(file.m);
    for (i, e) in file.ellipsoids.into_iter().enumerate() {
        let loc = |field: &str| format!("ellipsoids[{i}].{field}");
        if e.a.len() != n {
            return Err(FeasError::parse(
                loc("A"),
                format!("expected {n} rows, got {}", e.a.len()),
            ));
        }
        if let Some((r, row)) = e.a.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(FeasError::parse(
                format!("{}[{r}]", loc("A")),
                format!("expected {n} columns, got {}", row.len()),
            ));
        }
        if e.b.len() != n {
            return Err(FeasError::parse(
                loc("b"),
                format!("expected length {n}, got {}", e.b.len()),
            ));
        }
        let rows: Vec<f64> = e.a.into_iter().flatten().collect();
        let field = |err: &FeasError| match err {
            FeasError::InvalidEllipsoid(msg) if msg.starts_with("c ") => loc("c"),
            _ => loc("A"),
        };
        let ell = Ellipsoid::new(rows, e.b, e.c)
            .map_err(|err| FeasError::parse(field(&err), err.to_string()))?;
        constraints.push(Constraint::Ellipsoid(ell));
    }
    let id = file
        .id
        .unwrap_or_else(|| format!("ell-n{n}-m{}", constraints.len()));
    let inst = CfpInstance::new(id, n, constraints)?;
    match file.slater_point {
        Some(p) if p.len() != n => Err(FeasError::parse(
            "slater_point",
            format!("expected length {n}, got {}", p.len()),
        )),
        Some(p) => inst
            .with_slater_point(p)
            .map_err(|e| FeasError::parse("slater_point", e.to_string())),
        None => Ok(inst),
    }
}

#[cfg(test)]
fn ellipsoids_equal(a: &CfpInstance, b: &CfpInstance) -> bool {
    a.len() == b.len()
        && a.constraints()
            .iter()
            .zip(b.constraints())
            .all(|(x, y)| match (x, y) {
                (Constraint::Ellipsoid(x), Constraint::Ellipsoid(y)) => x == y,
                _ => false,
            })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_ball(n: usize) -> CfpInstance {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        let e = Ellipsoid::new(a, vec![0.0; n], 1.0).unwrap();
        CfpInstance::new("ball", n, vec![e.into()])
            .unwrap()
            .with_slater_point(vec![0.0; n])
            .unwrap()
    }

    fn two_halfspaces() -> CfpInstance {
        CfpInstance::new(
            "interval",
            1,
            vec![
                Affine::new(vec![1.0], 1.0).into(),
                Affine::new(vec![-1.0], 1.0).into(),
            ],
        )
        .unwrap()
        .with_slater_point(vec![0.0])
        .unwrap()
    }

    #[test]
    fn max_violation_examples() {
        let ball = unit_ball(2);
        assert_eq!(ball.max_violation(&[2.0, 0.0]).unwrap(), 3.0);
        assert_eq!(ball.max_violation(&[0.0, 0.0]).unwrap(), -1.0);
        assert_eq!(two_halfspaces().max_violation(&[3.0]).unwrap(), 2.0);
        assert!(matches!(
            ball.max_violation(&[1.0]),
            Err(FeasError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn feasibility_examples() {
        let ball = unit_ball(2);
        assert!(ball.is_feasible(&[0.0, 0.0], 0.0).unwrap());
        assert!(!ball.is_feasible(&[2.0, 0.0], 0.0).unwrap());
        assert!(ball.is_feasible(&[1.0, 0.0], 0.0).unwrap());
        assert!(ball.is_feasible(&[2.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn ellipsoid_construction_checks() {
        assert!(Ellipsoid::new(vec![1.0, 0.5, 0.0, 1.0], vec![0.0; 2], 1.0).is_err());
        assert!(Ellipsoid::new(vec![1.0, 0.0, 0.0, -1.0], vec![0.0; 2], 1.0).is_err());
        assert!(Ellipsoid::new(vec![1.0, 0.0, 0.0, 1.0], vec![0.0; 2], 0.0).is_err());
        assert!(Ellipsoid::new(vec![1.0, 0.0, 0.0], vec![0.0; 2], 1.0).is_err());
        assert!(Ellipsoid::new(vec![2.0, 1.0, 1.0, 2.0], vec![0.0; 2], 1.0).is_ok());
    }

    #[test]
    fn ellipsoid_value_and_gradient_agree_with_separate_calls() {
        let e = Ellipsoid::new(vec![2.0, 1.0, 1.0, 3.0], vec![0.5, -1.0], 1.5).unwrap();
        let x = [0.3, -2.0];
        let mut g = [0.0; 2];
        let f = e.value_and_subgradient(&x, &mut g);
        // xᵀAx = 2*0.09 + 2*0.3*(-2) + 3*4 = 10.98; 2xᵀb = 2*(0.15 + 2) = 4.3
        assert!((f - (10.98 + 4.3 - 1.5)).abs() < 1e-12);
        assert!((e.value(&x) - f).abs() < 1e-12);
        assert_eq!(g.to_vec(), e.subgradient(&x));
        assert!((g[0] - 2.0 * (0.6 - 2.0 + 0.5)).abs() < 1e-12);
        assert!((g[1] - 2.0 * (0.3 - 6.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn generation_is_deterministic_and_slater_anchored() {
        let p = GenParams::default();
        let a = generate_ellipsoid_instance(6, 4, 99, &p).unwrap();
        let b = generate_ellipsoid_instance(6, 4, 99, &p).unwrap();
        assert_eq!(write_instance(&a).unwrap(), write_instance(&b).unwrap());
        let c = generate_ellipsoid_instance(6, 4, 100, &p).unwrap();
        assert_ne!(write_instance(&a).unwrap(), write_instance(&c).unwrap());

        for con in a.constraints() {
            let Constraint::Ellipsoid(e) = con else {
                panic!()
            };
            assert_eq!(e.value(&[0.0; 6]), -e.constant());
            assert!(e.constant() >= p.c_lo && e.constant() <= p.c_hi);
        }
        assert!(a.slater().unwrap().margin >= p.c_lo);
    }

    #[test]
    fn generated_matrices_are_spd_with_requested_spectrum() {
        let p = GenParams::default();
        let inst = generate_ellipsoid_instance(20, 5, 7, &p).unwrap();
        for con in inst.constraints() {
            let Constraint::Ellipsoid(e) = con else {
                panic!()
            };
            let m = DMatrix::from_row_slice(20, 20, e.matrix());
            let eig = m.symmetric_eigenvalues();
            let lo = eig.iter().cloned().fold(f64::MAX, f64::min);
            let hi = eig.iter().cloned().fold(f64::MIN, f64::max);
            assert!(lo >= p.eig_lo * (1.0 - 1e-10), "{lo}");
            assert!(hi <= p.eig_hi * (1.0 + 1e-10), "{hi}");
        }
    }

    #[test]
    fn invalid_generator_params() {
        let p = GenParams {
            c_lo: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            generate_ellipsoid_instance(2, 2, 0, &p),
            Err(FeasError::InvalidParams(_))
        ));
        let p = GenParams {
            eig_lo: -1.0,
            ..Default::default()
        };
        assert!(generate_ellipsoid_instance(2, 2, 0, &p).is_err());
        assert!(generate_ellipsoid_instance(0, 2, 0, &GenParams::default()).is_err());
        assert!(generate_ellipsoid_instance(2, 0, 0, &GenParams::default()).is_err());
    }

    #[test]
    fn gen_params_parse() {
        let p = GenParams::parse("eig_lo=0.1, eig_hi=10,b_scale=0.5").unwrap();
        assert_eq!(p.eig_lo, 0.1);
        assert_eq!(p.eig_hi, 10.0);
        assert_eq!(p.b_scale, Some(0.5));
        assert_eq!(p.c_lo, 1.0);
        assert!(GenParams::parse("nope=1").is_err());
        assert!(GenParams::parse("c_lo=-1").is_err());
        assert!(GenParams::parse("eig_lo").is_err());
        assert_eq!(GenParams::parse("").unwrap(), GenParams::default());
    }

    #[test]
    fn infeasible_start_examples() {
        let ball = unit_ball(2);
        let x = sample_infeasible_start(&ball, 3).unwrap();
        assert!(norm(&x) > 1.0);
        assert_eq!(x, sample_infeasible_start(&ball, 3).unwrap());

        let interval = two_halfspaces();
        for seed in 0..20 {
            let x = sample_infeasible_start(&interval, seed).unwrap();
            assert!(interval.max_violation(&x).unwrap() > 0.0);
            assert!(x[0].abs() > 1.0);
        }

        let no_slater = CfpInstance::new("x", 1, vec![Affine::new(vec![1.0], 1.0).into()]).unwrap();
        assert!(matches!(
            sample_infeasible_start(&no_slater, 0),
            Err(FeasError::MissingSlaterPoint)
        ));
    }

    #[test]
    fn unbounded_feasible_set_cannot_escape() {
        // f(x) = -1 everywhere except it is still convex: a constant oracle.
        #[derive(Debug)]
        struct Never;
        impl ConvexInequalityOracle for Never {
            fn dim(&self) -> usize {
                2
            }
            fn value(&self, _x: &[f64]) -> f64 {
                -1.0
            }
            fn subgradient_into(&self, _x: &[f64], out: &mut [f64]) {
                out.fill(0.0);
            }
        }
        let inst = CfpInstance::new("never", 2, vec![Constraint::Custom(Arc::new(Never))])
            .unwrap()
            .with_slater_point(vec![0.0, 0.0])
            .unwrap();
        assert!(matches!(
            sample_infeasible_start(&inst, 1),
            Err(FeasError::CannotEscape {
                doublings: MAX_ESCAPE_DOUBLINGS
            })
        ));
    }

    #[test]
    fn instance_round_trip() {
        let inst = generate_ellipsoid_instance(5, 3, 42, &GenParams::default()).unwrap();
        let bytes = write_instance(&inst).unwrap();
        let back = read_instance(&bytes).unwrap();
        assert!(ellipsoids_equal(&inst, &back));
        assert_eq!(back.id(), inst.id());
        assert_eq!(back.slater(), inst.slater());
        assert_eq!(write_instance(&back).unwrap(), bytes);
    }

    #[test]
    fn read_rejects_bad_documents() {
        let doc = |a: &str, c: &str| {
            format!(
                r#"{{"schema":"cfp-ellipsoids-v1","n":2,"m":1,"slater_point":[0,0],
                   "ellipsoids":[{{"A":{a},"b":[0,0],"c":{c}}}]}}"#
            )
        };
        let anon = read_instance(doc("[[1,0],[0,1]]", "1").as_bytes()).unwrap();
        assert_eq!(anon.id(), "ell-n2-m1");

        let err = read_instance(doc("[[1,0.5],[0,1]]", "1").as_bytes()).unwrap_err();
        assert!(
            matches!(&err, FeasError::Parse { location, .. } if location == "ellipsoids[0].A"),
            "{err}"
        );

        let err = read_instance(doc("[[1,0],[0,1]]", "0").as_bytes()).unwrap_err();
        assert!(
            matches!(&err, FeasError::Parse { location, .. } if location == "ellipsoids[0].c"),
            "{err}"
        );

        let err = read_instance(doc("[[1,0],[0]]", "1").as_bytes()).unwrap_err();
        assert!(matches!(err, FeasError::Parse { .. }));

        let err = read_instance(b"{\"schema\": \"cfp-ellipsoids-v1\",\n \"n\": oops}").unwrap_err();
        assert!(
            matches!(&err, FeasError::Parse { location, .. } if location.starts_with("line 2")),
            "{err}"
        );

        let wrong_schema = doc("[[1,0],[0,1]]", "1").replace("v1", "v9");
        assert!(read_instance(wrong_schema.as_bytes()).is_err());

        // Slater point outside the ellipsoid.
        let outside = doc("[[1,0],[0,1]]", "1").replace("[0,0],", "[5,5],");
        assert!(read_instance(outside.as_bytes()).is_err());
    }

    #[test]
    fn write_rejects_non_ellipsoids() {
        assert!(matches!(
            write_instance(&two_halfspaces()),
            Err(FeasError::Unserializable(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn ellipsoid_gradient_matches_central_differences(
                seed in any::<u64>(),
                n in 1usize..8,
                xs in prop::collection::vec(-3.0f64..3.0, 8),
            ) {
                let inst = generate_ellipsoid_instance(n, 1, seed, &GenParams::default()).unwrap();
                let e = &inst.constraints()[0];
                let x = &xs[..n];
                let g = e.subgradient(x);
                let h = 1e-5;
                for i in 0..n {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (e.value(&xp) - e.value(&xm)) / (2.0 * h);
                    prop_assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()), "i={} fd={} g={}", i, fd, g[i]);
                }
            }

            #[test]
            fn shipped_oracles_satisfy_subgradient_inequality(
                seed in any::<u64>(),
                n in 1usize..8,
                xs in prop::collection::vec(-3.0f64..3.0, 8),
                zs in prop::collection::vec(-3.0f64..3.0, 8),
            ) {
                let inst = generate_ellipsoid_instance(n, 2, seed, &GenParams::default()).unwrap();
                let (x, z) = (&xs[..n], &zs[..n]);
                let mut oracles: Vec<Constraint> = inst.constraints().to_vec();
                oracles.push(Affine::new(zs[..n].iter().map(|v| v + 0.5).collect(), 0.3).into());
                for o in &oracles {
                    let g = o.subgradient(x);
                    let diff: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
                    prop_assert!(o.value(z) >= o.value(x) + dot(&g, &diff) - 1e-10 * (1.0 + o.value(z).abs()));
                }
            }

            #[test]
            fn generated_instances_keep_origin_strictly_feasible(seed in any::<u64>(), n in 1usize..6, m in 1usize..6) {
                let p = GenParams::default();
                let inst = generate_ellipsoid_instance(n, m, seed, &p).unwrap();
                prop_assert!(inst.max_violation(&vec![0.0; n]).unwrap() <= -p.c_lo);
            }
        }
    }
}
