//! Synthetic noise fields with a relative amplitude `ε`.
//!
//! The amplitude is `A = ε·max|x|` against a reference field `x` (with a
//! floor of `1e-8` when the reference is identically zero). Gaussian noise is
//! drawn with standard deviation `A`; the structured patterns are built along
//! the last axis, normalized so that `max|η| = A`, and broadcast over the
//! leading axis in 2D.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Field;

/// Amplitude used when the reference field is identically zero.
pub const ZERO_REFERENCE_AMPLITUDE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    MultiSine,
    Perlin,
    RandomWalk,
    Zero,
}

/// Whether `epsilon` is relative to the reference field or an absolute scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseScale {
    #[default]
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub epsilon: f64,
    #[serde(default)]
    pub scale: NoiseScale,
    /// Sinusoid count for `multi_sine`.
    #[serde(default = "default_k_modes")]
    pub k_modes: usize,
    /// Lattice cells for `perlin`.
    #[serde(default = "default_cells")]
    pub cells: usize,
}

fn default_k_modes() -> usize {
    8
}

fn default_cells() -> usize {
    32
}

impl NoiseSpec {
    pub fn relative(kind: NoiseKind, epsilon: f64) -> Self {
        NoiseSpec {
            kind,
            epsilon,
            scale: NoiseScale::Relative,
            k_modes: default_k_modes(),
            cells: default_cells(),
        }
    }

    /// Gaussian noise with a fixed standard deviation.
    pub fn gaussian_std(std: f64) -> Self {
        NoiseSpec {
            scale: NoiseScale::Absolute,
            ..NoiseSpec::relative(NoiseKind::Gaussian, std)
        }
    }

    pub fn zero() -> Self {
        NoiseSpec::relative(NoiseKind::Zero, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::param(format!(
                "noise epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        if self.k_modes == 0 || self.cells == 0 {
            return Err(Error::param("k_modes and cells must be >= 1"));
        }
        Ok(())
    }

    /// Absolute amplitude `A` for `reference`.
    pub fn amplitude(&self, reference: &Field) -> Result<f64> {
        match self.scale {
            NoiseScale::Relative => noise_amplitude(self.epsilon, reference),
            NoiseScale::Absolute => {
                self.validate()?;
                Ok(self.epsilon)
            }
        }
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::gaussian_std(1e-4)
    }
}

/// `A = ε·max|reference|`, or `1e-8` for an all-zero reference.
pub fn noise_amplitude(epsilon: f64, reference: &Field) -> Result<f64> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::param(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    if epsilon == 0.0 {
        return Ok(0.0);
    }
    let m = reference.max_abs();
    Ok(if m == 0.0 {
        ZERO_REFERENCE_AMPLITUDE
    } else {
        epsilon * m
    })
}

/// Draws one noise field on the reference grid.
pub fn synthesize_noise<R: Rng + ?Sized>(spec: &NoiseSpec, reference: &Field, rng: &mut R) -> Result<Field> {
    spec.validate()?;
    let grid = reference.grid();
    let amp = spec.amplitude(reference)?;
    let len = grid.n();
    let pattern = match spec.kind {
        NoiseKind::Zero => return Ok(Field::zeros(grid)),
        NoiseKind::Gaussian => {
            let values = (0..grid.len())
                .map(|_| amp * rng.sample::<f64, _>(StandardNormal))
                .collect();
            return Field::new(grid, values);
        }
        NoiseKind::MultiSine => multi_sine_pattern(len, spec.k_modes, rng),
        NoiseKind::Perlin => perlin_pattern(len, spec.cells, rng),
        NoiseKind::RandomWalk => random_walk_pattern(len, rng),
    };
    let Some(scaled) = rescale(&pattern, amp) else {
        return Ok(Field::zeros(grid));
    };
    let values = scaled.iter().copied().cycle().take(grid.len()).collect();
    Field::new(grid, values)
}

/// `A·η̃/max|η̃|`; `None` for an all-zero pattern.
fn rescale(pattern: &[f64], amp: f64) -> Option<Vec<f64>> {
    let m = pattern.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return None;
    }
    Some(pattern.iter().map(|v| amp * (v / m)).collect())
}

/// Normalized coordinate `s_ℓ = ℓ / (L − 1)` on `[0, 1]`.
fn unit_coordinate(l: usize, len: usize) -> f64 {
    l as f64 / (len - 1) as f64
}

/// `Σ_k a_k sin(2πks + φ_k) + b_k cos(2πks + φ_k)` with one phase per mode.
pub fn multi_sine_pattern<R: Rng + ?Sized>(len: usize, k_modes: usize, rng: &mut R) -> Vec<f64> {
    let coeffs: Vec<(f64, f64, f64)> = (0..k_modes)
        .map(|_| {
            let a = rng.random_range(-1.0..1.0);
            let b = rng.random_range(-1.0..1.0);
            let phase = rng.random_range(0.0..2.0 * PI);
            (a, b, phase)
        })
        .collect();
    (0..len)
        .map(|l| {
            let s = unit_coordinate(l, len);
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &(a, b, phase))| {
                    let arg = 2.0 * PI * (k + 1) as f64 * s + phase;
                    a * arg.sin() + b * arg.cos()
                })
                .sum()
        })
        .collect()
}

pub fn quintic_fade(u: f64) -> f64 {
    u * u * u * (u * (u * 6.0 - 15.0) + 10.0)
}

/// 1D gradient noise at `s ∈ [0, 1]` over `gradients.len() − 1` cells.
pub fn perlin_value(gradients: &[f64], s: f64) -> f64 {
    let cells = gradients.len() - 1;
    let t = s * cells as f64;
    let i = (t.floor() as usize).min(cells - 1);
    let u = t - i as f64;
    let v0 = gradients[i] * u;
    let v1 = gradients[i + 1] * (u - 1.0);
    v0 + (v1 - v0) * quintic_fade(u)
}

/// Perlin pattern with `min(cells, len − 1)` lattice cells.
pub fn perlin_pattern<R: Rng + ?Sized>(len: usize, cells: usize, rng: &mut R) -> Vec<f64> {
    let c = cells.min(len - 1).max(1);
    let gradients: Vec<f64> = (0..=c).map(|_| rng.random_range(-1.0..1.0)).collect();
    (0..len)
        .map(|l| perlin_value(&gradients, unit_coordinate(l, len)))
        .collect()
}

/// Mean-centred partial sums of `U(−1, 1)` increments.
pub fn random_walk_pattern<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let mut acc = 0.0;
    let walk: Vec<f64> = (0..len)
        .map(|_| {
            acc += rng.random_range(-1.0..1.0);
            acc
        })
        .collect();
    let mean = walk.iter().sum::<f64>() / len as f64;
    walk.iter().map(|v| v - mean).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reference(max: f64) -> Field {
        let g = make_grid(1, 64, 1.0).unwrap();
        Field::from_fn(g, |x| max * (2.0 * PI * x[0]).sin().powi(3))
    }

    #[test]
    fn amplitude_examples() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let mut v = vec![0.5; 8];
        v[3] = -2.0;
        let r = Field::new(g, v).unwrap();
        assert_eq!(noise_amplitude(1e-3, &r).unwrap(), 2e-3);
        assert_eq!(noise_amplitude(1e-3, &Field::zeros(g)).unwrap(), 1e-8);
        assert_eq!(noise_amplitude(0.0, &r).unwrap(), 0.0);
        assert!(noise_amplitude(-1e-3, &r).is_err());
    }

    #[test]
    fn zero_kind_gives_zero_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let spec = NoiseSpec::relative(NoiseKind::Zero, 0.5);
        let z = synthesize_noise(&spec, &reference(3.0), &mut rng).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn structured_kinds_hit_amplitude() {
        let r = reference(1.0);
        let a = noise_amplitude(1e-3, &r).unwrap();
        for kind in [NoiseKind::MultiSine, NoiseKind::Perlin, NoiseKind::RandomWalk] {
            for seed in 0..20 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let eta = synthesize_noise(&NoiseSpec::relative(kind, 1e-3), &r, &mut rng).unwrap();
                assert!((eta.max_abs() - a).abs() <= 1e-12 * a, "{kind:?}");
            }
        }
    }

    #[test]
    fn random_walk_is_centred() {
        let r = reference(1.0);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let eta = synthesize_noise(&NoiseSpec::relative(NoiseKind::RandomWalk, 1e-3), &r, &mut rng).unwrap();
            assert!(eta.mean().abs() <= 1e-15);
        }
    }

    #[test]
    fn perlin_vanishes_on_lattice_and_is_continuous() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let gradients: Vec<f64> = (0..=32).map(|_| rng.random_range(-1.0..1.0)).collect();
        for i in 0..=32 {
            assert_eq!(perlin_value(&gradients, i as f64 / 32.0), 0.0);
        }
        for i in 1..32 {
            let s = i as f64 / 32.0;
            let left = perlin_value(&gradients, s - 1e-9);
            let right = perlin_value(&gradients, s + 1e-9);
            assert!((left - right).abs() < 1e-6);
        }
    }

    #[test]
    fn fade_endpoints() {
        assert_eq!(quintic_fade(0.0), 0.0);
        assert_eq!(quintic_fade(1.0), 1.0);
        assert!((quintic_fade(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn patterns_broadcast_over_rows_in_2d() {
        let g = make_grid(2, 16, 1.0).unwrap();
        let r = Field::from_fn(g, |x| x[0] + x[1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let eta = synthesize_noise(&NoiseSpec::relative(NoiseKind::Perlin, 1e-2), &r, &mut rng).unwrap();
        let v = eta.values();
        for i in 1..16 {
            assert_eq!(&v[i * 16..(i + 1) * 16], &v[..16]);
        }
    }

    #[test]
    fn gaussian_absolute_scale_ignores_reference() {
        let g = make_grid(2, 64, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let eta = synthesize_noise(&NoiseSpec::gaussian_std(1e-4), &Field::constant(g, 50.0), &mut rng).unwrap();
        let var = eta.values().iter().map(|v| v * v).sum::<f64>() / g.len() as f64;
        assert!((var.sqrt() - 1e-4).abs() < 0.05e-4);
    }

    #[test]
    fn rejects_bad_spec() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut spec = NoiseSpec::relative(NoiseKind::MultiSine, 1e-3);
        spec.k_modes = 0;
        assert!(synthesize_noise(&spec, &reference(1.0), &mut rng).is_err());
        let spec = NoiseSpec::relative(NoiseKind::Perlin, f64::NAN);
        assert!(synthesize_noise(&spec, &reference(1.0), &mut rng).is_err());
    }
}
