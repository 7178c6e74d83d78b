//! Residual checks for stored datasets.
//!
//! A pair's residual is `max|R(u) − f|` over all intervals, reported relative
//! to `max|f|` (absolute when `f ≡ 0`). With the base dataset at hand, HOPSS
//! pairs are instead judged by how far their residual departs from that of
//! their primary base pair, `max|[R(u_new) − f_new] − [R(u_i) − f_i]|`, which
//! is the quantity the forcing update keeps at roundoff level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopss::ResidualOperator;
use crate::pair::{Provenance, SolutionPair};
use crate::solver::{NonlinearForm, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub index: usize,
    /// `max|R(u) − f|`.
    pub max_residual: f64,
    pub max_forcing: f64,
    pub relative_residual: f64,
    /// Residual departure from the primary base pair, when checked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_consistency: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub samples: Vec<SampleReport>,
    pub passed: usize,
    pub failed: usize,
    pub max_relative_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_base_consistency: Option<f64>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    fn from_samples(tolerance: f64, samples: Vec<SampleReport>) -> Self {
        let passed = samples.iter().filter(|s| s.passed).count();
        let max_relative_residual = samples.iter().fold(0.0f64, |m, s| m.max(s.relative_residual));
        let max_base_consistency = samples
            .iter()
            .filter_map(|s| s.base_consistency)
            .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.max(c))));
        VerifyReport {
            tolerance,
            failed: samples.len() - passed,
            passed,
            samples,
            max_relative_residual,
            max_base_consistency,
        }
    }
}

/// `R(u) − f` per interval.
pub fn residual_mismatch(op: &mut ResidualOperator, pair: &SolutionPair) -> Result<Trajectory> {
    let r = op.residual(&pair.u)?;
    let f = pair.forcing_per_interval()?;
    let frames = r
        .frames()
        .iter()
        .zip(f.frames())
        .map(|(a, b)| a.add_scaled(b, -1.0))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(frames, r.dt(), r.t0())
}

/// Checks one pair; `base` is the primary base pair for HOPSS samples.
pub fn verify_pair(
    op: &mut ResidualOperator,
    index: usize,
    pair: &SolutionPair,
    base: Option<&SolutionPair>,
    tol: f64,
) -> Result<SampleReport> {
    let mismatch = residual_mismatch(op, pair)?;
    let max_residual = mismatch.max_abs();
    let max_forcing = pair.f.max_abs();
    let relative_residual = if max_forcing > 0.0 {
        max_residual / max_forcing
    } else {
        max_residual
    };
    let base_consistency = match base {
        Some(b) => {
            let base_mismatch = residual_mismatch(op, b)?;
            Some(mismatch.max_abs_diff(&base_mismatch))
        }
        None => None,
    };
    let passed = match base_consistency {
        Some(c) => c <= tol,
        None => relative_residual <= tol,
    };
    Ok(SampleReport {
        index,
        max_residual,
        max_forcing,
        relative_residual,
        base_consistency,
        passed,
    })
}

/// Streams `pairs` through [`verify_pair`]. When `base` is given, every HOPSS
/// pair is checked against `base[i]`.
pub fn verify_dataset<I>(
    pairs: I,
    base: Option<&[SolutionPair]>,
    tol: f64,
    form: NonlinearForm,
) -> Result<VerifyReport>
where
    I: IntoIterator<Item = Result<SolutionPair>>,
{
    if !(tol >= 0.0) {
        return Err(Error::param(format!("tolerance must be >= 0, got {tol}")));
    }
    let mut op: Option<ResidualOperator> = None;
    let mut samples = Vec::new();
    for (index, pair) in pairs.into_iter().enumerate() {
        let pair = pair?;
        let op = match &mut op {
            Some(op) if op.matches(&pair.u) => op,
            slot => slot.insert(ResidualOperator::new(pair.pde, pair.u.grid(), pair.u.dt(), form)?),
        };
        let primary = match (pair.provenance, base) {
            (Provenance::Hopss { i, .. }, Some(base)) => Some(base.get(i).ok_or_else(|| {
                Error::shape(format!(
                    "sample {index} refers to base pair {i}, base has {}",
                    base.len()
                ))
            })?),
            _ => None,
        };
        samples.push(verify_pair(op, index, &pair, primary, tol)?);
    }
    Ok(VerifyReport::from_samples(tol, samples))
}
