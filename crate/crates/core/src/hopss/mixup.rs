//! Mixup baseline: random normalized linear combinations of base pairs.
//!
//! Weights are drawn `α̃_i ~ N(0, 1)` and divided by their sum; the forcing is
//! mixed with the same weights. No forcing correction is applied, so for a
//! nonlinear PDE the mixed pair generally violates the discrete equation.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pair::{Forcing, Provenance, SolutionPair};
use crate::rng::{derive_seed, sample_rng};
use crate::solver::Trajectory;
use crate::spectral::Field;

use super::generate::check_base;

/// Raw weight sums below this are redrawn.
pub const MIN_WEIGHT_SUM: f64 = 1e-12;

/// Gaussian weights normalized to sum to one.
///
/// The last weight absorbs the rounding left by the division so that the
/// compensated sum of the returned weights is 1 to within an ulp or two.
pub fn mixup_weights<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    assert!(count > 0, "mixup needs at least one base");
    loop {
        let raw: Vec<f64> = (0..count).map(|_| rng.sample(StandardNormal)).collect();
        let sum = neumaier_sum(raw.iter().copied());
        if sum.abs() < MIN_WEIGHT_SUM {
            continue;
        }
        let mut weights: Vec<f64> = raw.iter().map(|a| a / sum).collect();
        if count > 1 {
            let rest = neumaier_sum(weights[..count - 1].iter().copied());
            weights[count - 1] = 1.0 - rest;
        } else {
            weights[0] = 1.0;
        }
        return weights;
    }
}

pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn mix_fields(fields: &[&Field], weights: &[f64]) -> Result<Field> {
    let grid = fields[0].grid();
    let mut values = vec![0.0; grid.len()];
    for (f, &w) in fields.iter().zip(weights) {
        if w == 1.0 && fields.len() == 1 {
            values.copy_from_slice(f.values());
        } else {
            values.iter_mut().zip(f.values()).for_each(|(v, x)| *v += w * x);
        }
    }
    Field::new(grid, values).map_err(|_| Error::NonFinite)
}

fn mix_trajectories(trajs: &[&Trajectory], weights: &[f64]) -> Result<Trajectory> {
    let first = trajs[0];
    let frames = (0..first.len())
        .map(|n| {
            let fields: Vec<&Field> = trajs.iter().map(|t| &t.frames()[n]).collect();
            mix_fields(&fields, weights)
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(frames, first.dt(), first.t0())
}

/// Mixes `base` with explicit weights.
pub fn mixup_with_weights(base: &[SolutionPair], weights: &[f64]) -> Result<(Trajectory, Forcing)> {
    if base.is_empty() {
        return Err(Error::InsufficientBase { required: 1, got: 0 });
    }
    if weights.len() != base.len() {
        return Err(Error::shape(format!(
            "{} weights for {} base pairs",
            weights.len(),
            base.len()
        )));
    }
    let us: Vec<&Trajectory> = base.iter().map(|p| &p.u).collect();
    let u = mix_trajectories(&us, weights)?;
    let all_static = base.iter().all(|p| matches!(p.f, Forcing::Static(_)));
    let f = if all_static {
        let fs: Vec<&Field> = base.iter().map(|p| &p.f.frames()[0]).collect();
        Forcing::Static(mix_fields(&fs, weights)?)
    } else {
        let owned = base
            .iter()
            .map(|p| p.forcing_per_interval())
            .collect::<Result<Vec<_>>>()?;
        let fs: Vec<&Trajectory> = owned.iter().collect();
        Forcing::PerInterval(mix_trajectories(&fs, weights)?)
    };
    Ok((u, f))
}

/// One mixed trajectory and its naively mixed forcing.
pub fn mixup_sample<R: Rng + ?Sized>(base: &[SolutionPair], rng: &mut R) -> Result<(Trajectory, Forcing)> {
    if base.is_empty() {
        return Err(Error::InsufficientBase { required: 1, got: 0 });
    }
    let weights = mixup_weights(base.len(), rng);
    mixup_with_weights(base, &weights)
}

/// Sample `k` of a mixup dataset with master seed `seed`.
pub fn mixup_pair(base: &[SolutionPair], seed: u64, k: u64) -> Result<SolutionPair> {
    let mut rng = sample_rng(seed, k);
    let (u, f) = mixup_sample(base, &mut rng)?;
    let provenance = Provenance::Mixup {
        seed: derive_seed(seed, k),
    };
    SolutionPair::new(u, f, provenance, base[0].pde)
}

/// Samples `range` of a mixup dataset, computed in parallel and returned in
/// index order.
pub fn mixup_range(base: &[SolutionPair], seed: u64, range: std::ops::Range<u64>) -> Result<Vec<SolutionPair>> {
    check_base(base, 1)?;
    range.into_par_iter().map(|k| mixup_pair(base, seed, k)).collect()
}

pub fn generate_mixup_dataset(base: &[SolutionPair], count: usize, seed: u64) -> Result<Vec<SolutionPair>> {
    mixup_range(base, seed, 0..count as u64)
}
