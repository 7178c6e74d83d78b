#![allow(dead_code)]

use std::f64::consts::PI;

use hopss_core::{Field, SpatialGrid, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(dims: usize, n: usize) -> SpatialGrid {
    SpatialGrid::new(dims, n, 1.0).unwrap()
}

/// Random trigonometric polynomial with every wavenumber index at most
/// `kmax` in magnitude on each axis, and peak coefficient `amp`.
pub fn band_limited<R: Rng>(grid: SpatialGrid, kmax: i32, amp: f64, rng: &mut R) -> Field {
    let mut terms = Vec::new();
    let ky_range = if grid.dims() == 2 { -kmax..=kmax } else { 0..=0 };
    for kx in 0..=kmax {
        for ky in ky_range.clone() {
            // one representative of each ±k pair
            if kx == 0 && ky <= 0 {
                continue;
            }
            let a = amp * rng.random_range(-1.0..1.0);
            let b = amp * rng.random_range(-1.0..1.0);
            terms.push((kx as f64, ky as f64, a, b));
        }
    }
    let c = rng.random_range(-amp..amp);
    Field::from_fn(grid, |x| {
        let y = x.get(1).copied().unwrap_or(0.0);
        c + terms
            .iter()
            .map(|&(kx, ky, a, b)| {
                let ph = 2.0 * PI * (kx * x[0] + ky * y);
                a * ph.sin() + b * ph.cos()
            })
            .sum::<f64>()
    })
}

pub fn band_limited_trajectory<R: Rng>(
    grid: SpatialGrid,
    frames: usize,
    kmax: i32,
    amp: f64,
    dt: f64,
    rng: &mut R,
) -> Trajectory {
    let frames = (0..frames).map(|_| band_limited(grid, kmax, amp, rng)).collect();
    Trajectory::new(frames, dt, 0.0).unwrap()
}

pub fn zip(a: &Field, b: &Field, op: impl Fn(f64, f64) -> f64) -> Field {
    let values = a.values().iter().zip(b.values()).map(|(x, y)| op(*x, *y)).collect();
    Field::new(a.grid(), values).unwrap()
}

pub fn scale(a: &Field, s: f64) -> Field {
    Field::new(a.grid(), a.values().iter().map(|x| s * x).collect()).unwrap()
}

pub fn max_abs_diff(a: &Trajectory, b: &Trajectory) -> f64 {
    a.max_abs_diff(b)
}
