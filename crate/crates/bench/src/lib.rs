//! Shared fixtures for the criterion benchmarks.

use hopss_core::pipeline::TraditionGenerator;
use hopss_core::{sample_grf, Field, GrfParams, SolutionPair, SpatialGrid, TraditionConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// NS desk configuration with `count` base pairs and `steps` fine steps
/// (a multiple of 20).
pub fn ns_desk(count: usize, steps: usize) -> TraditionConfig {
    TraditionConfig {
        count,
        steps,
        stride: steps / 20,
        ..TraditionConfig::navier_stokes_desk()
    }
}

pub fn base_pairs(config: TraditionConfig, seed: u64) -> Vec<SolutionPair> {
    TraditionGenerator::new(config, seed)
        .expect("valid config")
        .generate(0..config.count as u64)
        .expect("stable config")
}

/// One GRF draw on a unit-length grid.
pub fn grf_field(dims: usize, n: usize, params: GrfParams, seed: u64) -> Field {
    let grid = SpatialGrid::new(dims, n, 1.0).expect("valid grid");
    sample_grf(grid, &params, &mut ChaCha8Rng::seed_from_u64(seed)).expect("valid params")
}
