//! Convex feasibility by perturbed approximate circumcenters.
//!
//! The toolkit finds a point in `{x : f_i(x) <= 0, i = 1..m}` for convex
//! `f_i` accessed only through values and subgradients. The main method,
//! PACA, projects onto perturbed separating halfspaces and extrapolates their
//! average with the circumcentered-reflection step length; when the
//! perturbations decrease to zero slowly enough (a divergent series) and a
//! Slater point exists, it stops at an exactly feasible point after finitely
//! many iterations.
//!
//! Modules:
//! * [`geometry`]: halfspace projection, reflection, circumcenters;
//! * [`model`]: oracles, ellipsoid instances, generator and file format;
//! * [`schedule`]: perturbation sequences;
//! * [`solver`]: PACA, SSPM, MCSP and CARMprod;
//! * [`product`]: the product-space CRM used to cross-check PACA;
//! * [`bench`]: suites, timing statistics and performance profiles.

// Negated float comparisons are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod geometry;
pub mod model;
pub mod product;
pub mod schedule;
pub mod solver;

pub use error::{FeasError, Result};
pub use geometry::{circumcenter3, project_halfspace, reflect, Halfspace};
pub use model::{
    generate_ellipsoid_instance, read_instance, sample_infeasible_start, write_instance, Affine,
    CfpInstance, Constraint, ConvexInequalityOracle, Ellipsoid, GenParams, SlaterPoint,
};
pub use product::{
    check_equivalence, crm_step, project_diagonal, project_s, BlockVector, EquivalenceReport,
};
pub use schedule::PerturbationSchedule;
pub use solver::{
    cyclic_step, paca_step, run, simultaneous_step, Algorithm, McspRelaxation, SolveReport,
    SolveStatus, SolverConfig, StepRecord, TraceMode,
};
