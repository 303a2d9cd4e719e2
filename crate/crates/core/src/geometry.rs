//! Euclidean primitives: halfspace projection and reflection, and the
//! circumcenter of three points.
//!
//! Points are plain `&[f64]` slices; every routine is a pure function.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, FeasError, Result};

/// Relative threshold under which two points of a circumcenter triple count as equal.
pub const DUPLICATE_REL_TOL: f64 = 1e-14;

/// Relative pivot threshold for the 2x2 Gram elimination.
pub const GRAM_PIVOT_REL_TOL: f64 = 1e-13;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `y += s * x`
#[inline]
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// The closed halfspace `{y : normal·y <= offset}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.is_empty() {
            return Err(FeasError::InvalidParams(
                "halfspace dimension must be positive".into(),
            ));
        }
        if !(norm_sq(&normal) > 0.0) {
            return Err(FeasError::ZeroNormal);
        }
        Ok(Self { normal, offset })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dot(&self.normal, x) <= self.offset
    }
}

/// Orthogonal projection `x - max(0, a·x - alpha)/|a|^2 * a`.
pub fn project_halfspace(h: &Halfspace, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(h.dim(), x.len())?;
    let excess = dot(&h.normal, x) - h.offset;
    let mut p = x.to_vec();
    if excess > 0.0 {
        axpy(-excess / norm_sq(&h.normal), &h.normal, &mut p);
    }
    Ok(p)
}

/// Reflection `2 P_H(x) - x`.
pub fn reflect(h: &Halfspace, x: &[f64]) -> Result<Vec<f64>> {
    let p = project_halfspace(h, x)?;
    Ok(p.iter().zip(x).map(|(pi, xi)| 2.0 * pi - xi).collect())
}

/// Circumcenter of `x`, `y`, `z` within their affine hull.
///
/// Coincident points are collapsed first: three equal points give `x`, two
/// distinct points give their midpoint. Otherwise the center is
/// `x + s (y - x) + t (z - x)` where `(s, t)` solves the Gram system of the two
/// equidistance equations. Three distinct collinear points have no
/// circumcenter and yield [`FeasError::DegenerateConfiguration`].
///
/// `tol` bounds the accepted equidistance residual relative to
/// `1 + max pairwise distance`; pass a non-positive value to skip the check.
pub fn circumcenter3(x: &[f64], y: &[f64], z: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = x.len();
    check_dim(n, y.len())?;
    check_dim(n, z.len())?;

    let dup = DUPLICATE_REL_TOL * (1.0 + norm(x));
    let dxy = distance(x, y);
    let dxz = distance(x, z);
    let dyz = distance(y, z);
    let xy_same = dxy <= dup;
    let xz_same = dxz <= dup;
    let yz_same = dyz <= dup;

    let midpoint = |p: &[f64], q: &[f64]| -> Vec<f64> {
        p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect()
    };

    match (xy_same, xz_same, yz_same) {
        (true, true, _) | (true, _, true) | (_, true, true) => return Ok(x.to_vec()),
        (true, false, false) => return Ok(midpoint(x, z)),
        (false, true, false) => return Ok(midpoint(x, y)),
        (false, false, true) => return Ok(midpoint(x, y)),
        (false, false, false) => {}
    }

    let a: Vec<f64> = y.iter().zip(x).map(|(p, q)| p - q).collect();
    let b: Vec<f64> = z.iter().zip(x).map(|(p, q)| p - q).collect();
    let g11 = norm_sq(&a);
    let g12 = dot(&a, &b);
    let g22 = norm_sq(&b);
    let (s, t) = solve_gram(g11, g12, g22, 0.5 * g11, 0.5 * g22)?;

    let mut c = x.to_vec();
    axpy(s, &a, &mut c);
    axpy(t, &b, &mut c);

    if tol > 0.0 {
        let rx = distance(&c, x);
        let ry = distance(&c, y);
        let rz = distance(&c, z);
        let spread = (rx - ry).abs().max((rx - rz).abs()).max((ry - rz).abs());
        let scale = 1.0 + dxy.max(dxz).max(dyz);
        if !(spread <= tol * scale) {
            return Err(FeasError::DegenerateConfiguration);
        }
    }
    Ok(c)
}

/// Solves the symmetric 2x2 system `[[g11, g12], [g12, g22]] (s, t) = (r1, r2)`
/// by elimination with partial pivoting.
fn solve_gram(g11: f64, g12: f64, g22: f64, r1: f64, r2: f64) -> Result<(f64, f64)> {
    let scale = g11.abs().max(g12.abs()).max(g22.abs());
    let thresh = GRAM_PIVOT_REL_TOL * scale;
    if !(scale > 0.0) {
        return Err(FeasError::DegenerateConfiguration);
    }
    // Rows are (g11 g12 | r1) and (g12 g22 | r2); pivot on the larger first-column entry.
    let (p_a, p_b, p_r, o_a, o_b, o_r) = if g11.abs() >= g12.abs() {
        (g11, g12, r1, g12, g22, r2)
    } else {
        (g12, g22, r2, g11, g12, r1)
    };
    if p_a.abs() <= thresh {
        return Err(FeasError::DegenerateConfiguration);
    }
    let factor = o_a / p_a;
    let second = o_b - factor * p_b;
    if second.abs() <= thresh {
        return Err(FeasError::DegenerateConfiguration);
    }
    let t = (o_r - factor * p_r) / second;
    let s = (p_r - p_b * t) / p_a;
    if !(s.is_finite() && t.is_finite()) {
        return Err(FeasError::DegenerateConfiguration);
    }
    Ok((s, t))
}
