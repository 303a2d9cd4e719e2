//! Shared fixtures for the criterion benchmarks.

use feaskit_core::bench::instance_seed;
use feaskit_core::{generate_ellipsoid_instance, sample_infeasible_start, CfpInstance, GenParams};

/// A generated instance with its deterministic infeasible start.
pub struct Fixture {
    pub instance: CfpInstance,
    pub x0: Vec<f64>,
}

pub fn fixture(n: usize, m: usize, index: usize) -> Fixture {
    let seed = instance_seed(0xFEA5, n, m, index);
    let instance = generate_ellipsoid_instance(n, m, seed, &GenParams::default())
        .expect("valid default params");
    let x0 =
        sample_infeasible_start(&instance, seed ^ 0x5eed).expect("generated instances are bounded");
    Fixture { instance, x0 }
}
