//! Circumcentered reflections in the product space `R^{nm}`.
//!
//! The `m` constraints become the product set `S = S_1 x ... x S_m` of
//! perturbed separating halfspaces, paired with the diagonal
//! `D = {(x, ..., x)}`. One CRM step from a diagonal point is
//!
//! ```text
//! y = R_S(x),  z = R_D(y),  x+ = circumcenter(x, y, z)
//! ```
//!
//! computed here with the generic [`circumcenter3`], never with the closed
//! form used by [`crate::solver`]. That keeps [`check_equivalence`] an
//! independent check of the PACA update.

use serde::Serialize;

use crate::error::{check_dim, FeasError, Result};
use crate::geometry::{circumcenter3, distance, norm, norm_sq};
use crate::model::{CfpInstance, ConvexInequalityOracle};
use crate::schedule::PerturbationSchedule;
use crate::solver::paca_step;

/// Relative tolerance for accepting a block vector as diagonal.
pub const DIAGONAL_REL_TOL: f64 = 1e-10;

/// Equidistance tolerance passed to [`circumcenter3`].
pub const CIRCUMCENTER_TOL: f64 = 1e-8;

/// Relative threshold for recognising `P_D(y) = x`, the configuration in
/// which the three CRM points are collinear with `x` as their midpoint.
pub const FIXED_POINT_REL_TOL: f64 = 1e-14;

/// An element of `R^{nm}` stored as `m` contiguous blocks of length `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockVector {
    n: usize,
    data: Vec<f64>,
}

impl BlockVector {
    pub fn from_blocks(blocks: &[Vec<f64>]) -> Result<Self> {
        let n = blocks
            .first()
            .map(Vec::len)
            .ok_or(FeasError::EmptyInstance)?;
        if n == 0 {
            return Err(FeasError::InvalidParams("blocks must be nonempty".into()));
        }
        for b in blocks {
            check_dim(n, b.len())?;
        }
        Ok(Self {
            n,
            data: blocks.concat(),
        })
    }

    /// `(x, x, ..., x)` with `m` copies.
    pub fn diagonal(x: &[f64], m: usize) -> Self {
        let mut data = Vec::with_capacity(x.len() * m);
        for _ in 0..m {
            data.extend_from_slice(x);
        }
        Self { n: x.len(), data }
    }

    fn from_flat(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len() % n, 0);
        Self { n, data }
    }

    pub fn block_dim(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mean_block(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.n];
        for b in self.blocks() {
            for (zi, bi) in z.iter_mut().zip(b) {
                *zi += bi;
            }
        }
        let inv = 1.0 / self.num_blocks() as f64;
        z.iter_mut().for_each(|v| *v *= inv);
        z
    }

    /// Largest distance of a block from the block mean, relative to `1 + |mean|`.
    pub fn diagonal_defect(&self) -> f64 {
        let z = self.mean_block();
        let scale = 1.0 + norm(&z);
        self.blocks().map(|b| distance(b, &z)).fold(0.0, f64::max) / scale
    }

    pub fn is_diagonal(&self, rel_tol: f64) -> bool {
        self.diagonal_defect() <= rel_tol
    }
}

/// Orthogonal projection onto the diagonal: every block becomes the block mean.
pub fn project_diagonal(v: &BlockVector) -> BlockVector {
    BlockVector::diagonal(&v.mean_block(), v.num_blocks())
}

/// Product-space CRM over one instance, with reusable evaluation buffers.
pub struct ProductCrm<'a> {
    inst: &'a CfpInstance,
    values: Vec<f64>,
    grads: Vec<f64>,
    evaluated_at: Option<Vec<f64>>,
}

impl<'a> ProductCrm<'a> {
    pub fn new(inst: &'a CfpInstance) -> Self {
        let (n, m) = (inst.dim(), inst.len());
        Self {
            inst,
            values: vec![0.0; m],
            grads: vec![0.0; n * m],
            evaluated_at: None,
        }
    }

    fn common_block(&self, xblk: &BlockVector) -> Result<Vec<f64>> {
        check_dim(self.inst.dim(), xblk.block_dim())?;
        check_dim(self.inst.len(), xblk.num_blocks())?;
        if !xblk.is_diagonal(DIAGONAL_REL_TOL) {
            return Err(FeasError::NotDiagonal);
        }
        Ok(xblk.mean_block())
    }

    /// Evaluates all constraints at `x` and returns `max_i f_i(x)`.
    pub fn evaluate(&mut self, x: &[f64]) -> f64 {
        if self.evaluated_at.as_deref() != Some(x) {
            let n = self.inst.dim();
            for (i, c) in self.inst.constraints().iter().enumerate() {
                self.values[i] = c.value_and_subgradient(x, &mut self.grads[i * n..(i + 1) * n]);
            }
            self.evaluated_at = Some(x.to_vec());
        }
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Blockwise projection onto `S`: block `i` becomes the projection of the
    /// common block `x` onto `{y : u_iᵀ(y - x) + f_i(x) + eps <= 0}`.
    pub fn project_s(&mut self, xblk: &BlockVector, eps: f64) -> Result<BlockVector> {
        let x = self.common_block(xblk)?;
        self.project_s_at(&x, eps)
    }

    fn project_s_at(&mut self, x: &[f64], eps: f64) -> Result<BlockVector> {
        self.evaluate(x);
        let n = self.inst.dim();
        let m = self.inst.len();
        let mut out = Vec::with_capacity(n * m);
        for i in 0..m {
            let g = &self.grads[i * n..(i + 1) * n];
            let excess = self.values[i] + eps;
            if excess > 0.0 {
                let gn2 = norm_sq(g);
                if !(gn2 > 0.0) {
                    return Err(FeasError::ZeroSubgradientAtViolation { index: i });
                }
                let t = excess / gn2;
                out.extend(x.iter().zip(g).map(|(xj, gj)| xj - t * gj));
            } else {
                out.extend_from_slice(x);
            }
        }
        Ok(BlockVector::from_flat(n, out))
    }

    /// One circumcentered-reflection step from a diagonal point.
    pub fn step(&mut self, xblk: &BlockVector, eps: f64) -> Result<BlockVector> {
        let x = self.common_block(xblk)?;
        let n = x.len();
        let p = self.project_s_at(&x, eps)?;
        let xs = xblk.as_slice();
        let y: Vec<f64> = p
            .as_slice()
            .iter()
            .zip(xs)
            .map(|(pi, xi)| 2.0 * pi - xi)
            .collect();
        let y = BlockVector::from_flat(n, y);
        let pd = project_diagonal(&y);
        let z: Vec<f64> = pd
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| 2.0 * a - b)
            .collect();

        match circumcenter3(xs, y.as_slice(), &z, CIRCUMCENTER_TOL) {
            Ok(c) => Ok(BlockVector::from_flat(n, c)),
            Err(FeasError::DegenerateConfiguration) => {
                // y and z mirror each other through x exactly when P_D(y) = x;
                // no circumcenter exists and the iterate stays put.
                if distance(pd.as_slice(), xs) <= FIXED_POINT_REL_TOL * distance(y.as_slice(), xs) {
                    Ok(xblk.clone())
                } else {
                    Err(FeasError::DegenerateConfiguration)
                }
            }
            Err(e) => Err(e),
        }
    }
}

/// [`ProductCrm::project_s`] for a single call.
pub fn project_s(inst: &CfpInstance, xblk: &BlockVector, eps: f64) -> Result<BlockVector> {
    ProductCrm::new(inst).project_s(xblk, eps)
}

/// [`ProductCrm::step`] for a single call.
pub fn crm_step(inst: &CfpInstance, xblk: &BlockVector, eps: f64) -> Result<BlockVector> {
    ProductCrm::new(inst).step(xblk, eps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// Largest `|x^k - block_i(X^k)| / max(1, |x^k|)` over compared iterations and blocks.
    pub max_rel_error: f64,
    /// Iterations compared (steps taken by both sequences).
    pub iterations: usize,
    /// Index at which both sequences reached the feasible set, if they did within the budget.
    pub stopped_at: Option<usize>,
}

/// Runs PACA in `R^n` and CRM in `R^{nm}` side by side for up to `max_iter`
/// steps with the same perturbations, comparing `x^k` with every block of
/// the product-space iterate. Both sequences must reach feasibility
/// (tolerance 0) at the same index.
pub fn check_equivalence(
    inst: &CfpInstance,
    x0: &[f64],
    sched: &PerturbationSchedule,
    max_iter: usize,
) -> Result<EquivalenceReport> {
    check_dim(inst.dim(), x0.len())?;
    if max_iter == 0 {
        return Err(FeasError::InvalidParams(
            "iteration budget must be >= 1".into(),
        ));
    }
    let m = inst.len();
    let mut crm = ProductCrm::new(inst);
    let mut x = x0.to_vec();
    let mut xb = BlockVector::diagonal(x0, m);
    let mut max_rel_error = 0.0f64;

    for k in 0..=max_iter {
        let rel = xb.blocks().map(|b| distance(b, &x)).fold(0.0, f64::max) / norm(&x).max(1.0);
        max_rel_error = max_rel_error.max(rel);

        let direct_done = inst.max_violation(&x)? <= 0.0;
        let product_done = crm.evaluate(&xb.mean_block()) <= 0.0;
        if direct_done != product_done {
            return Err(FeasError::MismatchedTermination {
                iteration: k,
                direct: direct_done,
                product: product_done,
            });
        }
        if direct_done {
            return Ok(EquivalenceReport {
                max_rel_error,
                iterations: k,
                stopped_at: Some(k),
            });
        }
        if k == max_iter {
            break;
        }
        let eps = sched.epsilon(k);
        x = paca_step(inst, &x, eps)?.0;
        xb = crm.step(&xb, eps)?;
    }
    Ok(EquivalenceReport {
        max_rel_error,
        iterations: max_iter,
        stopped_at: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{project_halfspace, Halfspace};
    use crate::model::{generate_ellipsoid_instance, sample_infeasible_start, Affine, GenParams};

    fn interval() -> CfpInstance {
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
    fn diagonal_projection_examples() {
        let v = BlockVector::from_blocks(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let p = project_diagonal(&v);
        assert_eq!(p.as_slice(), &[2.0, 3.0, 2.0, 3.0]);
        assert_eq!(project_diagonal(&p), p);
        let single = BlockVector::from_blocks(&[vec![5.0, -1.0]]).unwrap();
        assert_eq!(project_diagonal(&single), single);
    }

    #[test]
    fn project_s_examples() {
        let inst = interval();
        let p = project_s(&inst, &BlockVector::diagonal(&[3.0], 2), 1.0).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 3.0]);
        let p = project_s(&inst, &BlockVector::diagonal(&[0.25], 2), 0.5).unwrap();
        assert_eq!(p.as_slice(), &[0.25, 0.25]);
    }

    #[test]
    fn project_s_single_set_is_halfspace_projection() {
        let inst = CfpInstance::new("h", 2, vec![Affine::new(vec![3.0, 4.0], 1.0).into()]).unwrap();
        let p = project_s(&inst, &BlockVector::diagonal(&[2.0, 2.0], 1), 0.0).unwrap();
        let h = Halfspace::new(vec![3.0, 4.0], 1.0).unwrap();
        let q = project_halfspace(&h, &[2.0, 2.0]).unwrap();
        for (a, b) in p.as_slice().iter().zip(&q) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn project_s_rejects_off_diagonal_input() {
        let v = BlockVector::from_blocks(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(matches!(
            project_s(&interval(), &v, 0.0),
            Err(FeasError::NotDiagonal)
        ));
        assert!(matches!(
            crm_step(&interval(), &v, 0.0),
            Err(FeasError::NotDiagonal)
        ));
    }

    #[test]
    fn crm_step_examples() {
        let inst = interval();
        let x1 = crm_step(&inst, &BlockVector::diagonal(&[3.0], 2), 1.0).unwrap();
        assert!(x1.as_slice().iter().all(|v| v.abs() < 1e-14), "{x1:?}");
        let x1 = crm_step(&inst, &BlockVector::diagonal(&[3.0], 2), 0.0).unwrap();
        assert!(
            x1.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-14),
            "{x1:?}"
        );
        // Interior point with small perturbation: all reflections coincide.
        let x = BlockVector::diagonal(&[0.1], 2);
        assert_eq!(crm_step(&inst, &x, 0.2).unwrap(), x);
        // w = 0 configuration: y and z mirror through x.
        let x = BlockVector::diagonal(&[0.0], 2);
        assert_eq!(crm_step(&inst, &x, 2.0).unwrap(), x);
    }

    #[test]
    fn crm_iterates_stay_diagonal_and_match_paca() {
        for seed in 0..30u64 {
            let inst = generate_ellipsoid_instance(
                2 + (seed % 5) as usize,
                1 + (seed % 4) as usize,
                seed,
                &GenParams::default(),
            )
            .unwrap();
            let x0 = sample_infeasible_start(&inst, seed + 100).unwrap();
            let xb = BlockVector::diagonal(&x0, inst.len());
            let eps = 0.1 * (seed % 3) as f64;
            let next = crm_step(&inst, &xb, eps).unwrap();
            assert!(
                next.diagonal_defect() <= 1e-12,
                "seed {seed}: {}",
                next.diagonal_defect()
            );
            let (x1, _) = paca_step(&inst, &x0, eps).unwrap();
            for b in next.blocks() {
                assert!(distance(b, &x1) <= 1e-9 * norm(&x1).max(1.0));
            }
            // |X+ - X|^2 = m |x+ - x|^2
            let lhs = norm_sq(
                &next
                    .as_slice()
                    .iter()
                    .zip(xb.as_slice())
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
            );
            let step: f64 = x1.iter().zip(&x0).map(|(a, b)| (a - b) * (a - b)).sum();
            let rhs = inst.len() as f64 * step;
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn equivalence_hand_example() {
        let r =
            check_equivalence(&interval(), &[3.0], &PerturbationSchedule::HARMONIC, 10).unwrap();
        assert!(r.max_rel_error <= 1e-12);
        assert_eq!(r.stopped_at, Some(1));
    }

    #[test]
    fn equivalence_from_feasible_start() {
        let inst = generate_ellipsoid_instance(3, 2, 1, &GenParams::default()).unwrap();
        let r = check_equivalence(&inst, &[0.0; 3], &PerturbationSchedule::INV_SQRT, 5).unwrap();
        assert_eq!(r.stopped_at, Some(0));
        assert_eq!(r.max_rel_error, 0.0);
        assert!(check_equivalence(&inst, &[0.0; 3], &PerturbationSchedule::INV_SQRT, 0).is_err());
    }
}
