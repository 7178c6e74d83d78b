//! Gaussian random fields with covariance `σ² (−∇² + τ² I)^(−α)`.
//!
//! A draw is built by colouring white noise in spectral space: each Fourier
//! coefficient of a unit-variance white-noise field is multiplied by
//! `sqrt(N · λ_k)` with `λ_k = σ² (|k|² + τ²)^(−α)` and `k = 2π j / length`,
//! so the field's Fourier-series coefficient `c_k` has `E|c_k|² = λ_k`
//! independently of the resolution. The mean mode is zeroed.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{with_spectral, Field, SpatialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrfParams {
    /// Inverse length scale.
    pub tau: f64,
    /// Spectral decay exponent.
    pub alpha: f64,
    /// Amplitude scale.
    pub sigma: f64,
}

impl GrfParams {
    pub fn new(tau: f64, alpha: f64, sigma: f64) -> Self {
        GrfParams { tau, alpha, sigma }
    }

    pub fn validate(&self, dims: usize) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::param(format!("GRF tau must be > 0, got {}", self.tau)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::param(format!("GRF sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.alpha > dims as f64 / 2.0 && self.alpha.is_finite()) {
            return Err(Error::param(format!(
                "GRF alpha must exceed dims/2 = {}, got {}",
                dims as f64 / 2.0,
                self.alpha
            )));
        }
        Ok(())
    }

    /// Covariance eigenvalue `λ_k` for squared wavenumber `k2`.
    pub fn eigenvalue(&self, k2: f64) -> f64 {
        self.sigma * self.sigma * (k2 + self.tau * self.tau).powf(-self.alpha)
    }
}

/// One zero-mean draw on `grid`. Deterministic given the state of `rng`.
pub fn sample_grf<R: Rng + ?Sized>(grid: SpatialGrid, params: &GrfParams, rng: &mut R) -> Result<Field> {
    params.validate(grid.dims())?;
    let noise: Vec<f64> = (0..grid.len()).map(|_| rng.sample(StandardNormal)).collect();
    let points = grid.len() as f64;
    Ok(with_spectral(grid, |sp| {
        let mut coeffs = vec![Default::default(); grid.spectral_len()];
        sp.forward_into(&noise, &mut coeffs);
        for (c, m) in coeffs.iter_mut().zip(sp.modes()) {
            let k2 = m.k_squared();
            if k2 == 0.0 {
                *c = Default::default();
            } else {
                *c *= (points * params.eigenvalue(k2)).sqrt();
            }
        }
        let mut out = vec![0.0; grid.len()];
        sp.inverse_into(&coeffs, &mut out);
        Field::from_vec_unchecked(grid, out)
    }))
}
