//! Mapping fine solver output to training resolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::Trajectory;
use crate::spectral::{with_spectral, Complex64, Field};

/// Spatial coarsening method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialDownsample {
    /// Keep every `factor`-th point, anchored at index 0.
    #[default]
    Subsample,
    /// Keep the Fourier modes representable on the coarse grid.
    SpectralTruncation,
}

/// Keeps frames `0, stride, 2·stride, …`.
pub fn downsample_time(traj: &Trajectory, stride: usize) -> Result<Trajectory> {
    let intervals = traj.len() - 1;
    if stride == 0 || !intervals.is_multiple_of(stride) {
        return Err(Error::param(format!(
            "time stride {stride} does not divide {intervals} intervals"
        )));
    }
    let frames = traj.frames().iter().step_by(stride).cloned().collect();
    Trajectory::new(frames, traj.dt() * stride as f64, traj.t0())
}

pub fn downsample_space(traj: &Trajectory, factor: usize) -> Result<Trajectory> {
    downsample_space_with(traj, factor, SpatialDownsample::Subsample)
}

pub fn downsample_space_with(traj: &Trajectory, factor: usize, method: SpatialDownsample) -> Result<Trajectory> {
    let frames = traj
        .frames()
        .iter()
        .map(|f| downsample_field(f, factor, method))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(frames, traj.dt(), traj.t0())
}

pub fn downsample_field(field: &Field, factor: usize, method: SpatialDownsample) -> Result<Field> {
    let fine = field.grid();
    let coarse = fine.coarsened(factor)?;
    if factor == 1 {
        return Ok(field.clone());
    }
    match method {
        SpatialDownsample::Subsample => {
            let n = fine.n();
            let v = field.values();
            let values = if fine.dims() == 1 {
                v.iter().step_by(factor).copied().collect()
            } else {
                (0..n)
                    .step_by(factor)
                    .flat_map(|i| (0..n).step_by(factor).map(move |j| v[i * n + j]))
                    .collect()
            };
            Ok(Field::from_vec_unchecked(coarse, values))
        }
        SpatialDownsample::SpectralTruncation => {
            let fine_hat = with_spectral(fine, |sp| sp.forward(field));
            let scale = coarse.len() as f64 / fine.len() as f64;
            let (nf, nc) = (fine.n(), coarse.n());
            let (hf, hc) = (nf / 2 + 1, nc / 2 + 1);
            let src = fine_hat.data();
            let mut data = vec![Complex64::new(0.0, 0.0); coarse.spectral_len()];
            // Coarse Nyquist modes are dropped; they cannot be represented
            // symmetrically.
            let keep = |s: i64| s.unsigned_abs() < (nc / 2) as u64;
            if fine.dims() == 1 {
                for j in 0..hc - 1 {
                    data[j] = src[j] * scale;
                }
            } else {
                for ic in 0..nc {
                    let s = coarse.signed_index(ic);
                    if !keep(s) {
                        continue;
                    }
                    let i_f = if s >= 0 { s as usize } else { (nf as i64 + s) as usize };
                    for j in 0..hc - 1 {
                        data[ic * hc + j] = src[i_f * hf + j] * scale;
                    }
                }
            }
            let mut out = vec![0.0; coarse.len()];
            with_spectral(coarse, |sp| sp.inverse_into(&data, &mut out));
            Ok(Field::from_vec_unchecked(coarse, out))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    fn ramp_trajectory(frames: usize, dt: f64, dims: usize, n: usize) -> Trajectory {
        let g = make_grid(dims, n, 1.0).unwrap();
        let fr = (0..frames)
            .map(|t| {
                let vals = (0..g.len()).map(|i| (t * 7919 + i) as f64 * 1e-3).collect();
                Field::new(g, vals).unwrap()
            })
            .collect();
        Trajectory::new(fr, dt, 0.0).unwrap()
    }

    #[test]
    fn ns_time_recipe() {
        let t = ramp_trajectory(10001, 1e-3, 1, 4);
        let d = downsample_time(&t, 500).unwrap();
        assert_eq!(d.len(), 21);
        assert!((d.dt() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn burgers_time_recipe_is_index_exact() {
        let t = ramp_trajectory(10001, 5e-3, 1, 4);
        let d = downsample_time(&t, 10).unwrap();
        assert_eq!(d.len(), 1001);
        assert!((d.dt() - 5e-2).abs() < 1e-16);
        for (j, f) in d.frames().iter().enumerate() {
            assert_eq!(f, &t.frames()[10 * j]);
        }
    }

    #[test]
    fn unit_stride_and_factor_are_identity() {
        let t = ramp_trajectory(5, 0.1, 2, 8);
        assert_eq!(downsample_time(&t, 1).unwrap(), t);
        assert_eq!(downsample_space(&t, 1).unwrap(), t);
    }

    #[test]
    fn time_composition() {
        let t = ramp_trajectory(25, 0.1, 1, 4);
        let ab = downsample_time(&downsample_time(&t, 2).unwrap(), 3).unwrap();
        let direct = downsample_time(&t, 6).unwrap();
        assert_eq!(ab.frames(), direct.frames());
        assert!((ab.dt() - direct.dt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_divisors() {
        let t = ramp_trajectory(11, 0.1, 1, 8);
        assert!(downsample_time(&t, 3).is_err());
        assert!(downsample_time(&t, 0).is_err());
        assert!(downsample_space(&t, 3).is_err());
        assert!(downsample_space(&t, 0).is_err());
        // 8 / 4 = 2 points is below the minimum grid size
        assert!(downsample_space(&t, 4).is_err());
    }

    #[test]
    fn grid_128_to_64_point_subsampling() {
        let t = ramp_trajectory(2, 1.0, 2, 128);
        let d = downsample_space(&t, 2).unwrap();
        assert_eq!(d.grid().n(), 64);
        let (fine, coarse) = (&t.frames()[1], &d.frames()[1]);
        for i in 0..64 {
            for j in 0..64 {
                assert_eq!(coarse.values()[i * 64 + j], fine.values()[(2 * i) * 128 + 2 * j]);
            }
        }
    }

    #[test]
    fn burgers_1024_to_64() {
        let t = ramp_trajectory(2, 1.0, 1, 1024);
        let d = downsample_space(&t, 16).unwrap();
        assert_eq!(d.grid().n(), 64);
        for i in 0..64 {
            assert_eq!(d.frames()[0].values()[i], t.frames()[0].values()[16 * i]);
        }
    }

    #[test]
    fn spectral_truncation_is_exact_on_resolved_modes() {
        let g = make_grid(2, 64, 1.0).unwrap();
        let f = Field::from_fn(g, |x| (2.0 * PI * x[0]).sin() * (6.0 * PI * x[1]).cos() + 0.5);
        let c = downsample_field(&f, 4, SpatialDownsample::SpectralTruncation).unwrap();
        let s = downsample_field(&f, 4, SpatialDownsample::Subsample).unwrap();
        assert!(c.max_abs_diff(&s) <= 1e-12);
        let g1 = make_grid(1, 64, 1.0).unwrap();
        let f = Field::from_fn(g1, |x| (4.0 * PI * x[0]).cos());
        let c = downsample_field(&f, 2, SpatialDownsample::SpectralTruncation).unwrap();
        let s = downsample_field(&f, 2, SpatialDownsample::Subsample).unwrap();
        assert!(c.max_abs_diff(&s) <= 1e-12);
    }
}
