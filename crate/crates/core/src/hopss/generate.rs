//! Parallel dataset synthesis from a set of base pairs.
//!
//! Sample `k` uses its own stream `sample_rng(seed, k)` and draws, in order:
//! the primary index `i`, the secondary index `j ≠ i`, then the noise field
//! `ξ` (amplitude referenced to the first frame of `u_i`). The new pair is
//! `u_new = u_i + μ u_j + ξ`, `f_new = f_i + R(u_new) − R(u_i)`.

use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pair::{Forcing, Provenance, SolutionPair};
use crate::rng::{derive_seed, sample_rng};
use crate::solver::{NonlinearForm, Trajectory};

use super::noise::{synthesize_noise, NoiseSpec};
use super::perturb::{apply_variation, homologous_perturb};
use super::residual::ResidualOperator;

/// How `(i, j)` is chosen for each new sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPolicy {
    /// Uniform over ordered pairs with `i ≠ j`, independently per sample.
    #[default]
    UniformDistinct,
}

impl PairPolicy {
    pub fn draw<R: Rng + ?Sized>(self, base_len: usize, rng: &mut R) -> (usize, usize) {
        match self {
            PairPolicy::UniformDistinct => {
                let i = rng.random_range(0..base_len);
                let mut j = rng.random_range(0..base_len - 1);
                if j >= i {
                    j += 1;
                }
                (i, j)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopssConfig {
    pub mu: f64,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub pair_policy: PairPolicy,
    pub count: usize,
    #[serde(default)]
    pub residual_form: NonlinearForm,
}

impl Default for HopssConfig {
    fn default() -> Self {
        HopssConfig {
            mu: 1e-3,
            noise: NoiseSpec::default(),
            pair_policy: PairPolicy::default(),
            count: 1000,
            residual_form: NonlinearForm::default(),
        }
    }
}

impl HopssConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && (0.0..1.0).contains(&self.mu)) {
            return Err(Error::param(format!("mu must satisfy 0 <= mu < 1, got {}", self.mu)));
        }
        if self.count == 0 {
            return Err(Error::param("count must be >= 1"));
        }
        self.noise.validate()
    }
}

/// Checks that `base` has at least `required` pairs of one common shape.
pub(crate) fn check_base(base: &[SolutionPair], required: usize) -> Result<()> {
    if base.len() < required {
        return Err(Error::InsufficientBase {
            required,
            got: base.len(),
        });
    }
    let first = &base[0];
    for (k, p) in base.iter().enumerate().skip(1) {
        p.u.ensure_aligned(&first.u)
            .map_err(|e| Error::shape(format!("base pair {k}: {e}")))?;
        if p.pde != first.pde {
            return Err(Error::shape(format!("base pair {k} has a different PDE")));
        }
    }
    Ok(())
}

/// Generator state shared by all worker threads.
pub struct HopssGenerator<'a> {
    base: &'a [SolutionPair],
    config: HopssConfig,
    seed: u64,
    forcing: Vec<Trajectory>,
    residual: Vec<Trajectory>,
}

impl<'a> HopssGenerator<'a> {
    /// Validates inputs and evaluates `R(u_i)` once per base pair.
    pub fn new(base: &'a [SolutionPair], config: HopssConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        check_base(base, 2)?;
        let first = &base[0];
        let op = ResidualOperator::new(first.pde, first.u.grid(), first.u.dt(), config.residual_form)?;
        let residual = base
            .par_iter()
            .map_init(|| op.clone(), |op, p| op.residual(&p.u))
            .collect::<Result<Vec<_>>>()?;
        let forcing = base
            .iter()
            .map(SolutionPair::forcing_per_interval)
            .collect::<Result<Vec<_>>>()?;
        Ok(HopssGenerator {
            base,
            config,
            seed,
            forcing,
            residual,
        })
    }

    pub fn config(&self) -> &HopssConfig {
        &self.config
    }

    fn operator(&self) -> ResidualOperator {
        let first = &self.base[0];
        ResidualOperator::new(first.pde, first.u.grid(), first.u.dt(), self.config.residual_form)
            .expect("validated in new")
    }

    fn sample(&self, op: &mut ResidualOperator, k: u64) -> Result<SolutionPair> {
        let mut rng = sample_rng(self.seed, k);
        let (i, j) = self.config.pair_policy.draw(self.base.len(), &mut rng);
        let (pi, pj) = (&self.base[i], &self.base[j]);
        let xi = synthesize_noise(&self.config.noise, &pi.u.frames()[0], &mut rng)?;
        let u_new = homologous_perturb(&pi.u, &pj.u, self.config.mu, &xi)?;
        let r_new = op.residual(&u_new)?;
        let f_new = apply_variation(&self.forcing[i], &r_new, &self.residual[i])?;
        let provenance = Provenance::Hopss {
            i,
            j,
            seed: derive_seed(self.seed, k),
        };
        SolutionPair::new(u_new, Forcing::PerInterval(f_new), provenance, pi.pde)
    }

    /// Provenance of sample `k` without generating it.
    pub fn provenance(&self, k: u64) -> Provenance {
        let mut rng = sample_rng(self.seed, k);
        let (i, j) = self.config.pair_policy.draw(self.base.len(), &mut rng);
        Provenance::Hopss {
            i,
            j,
            seed: derive_seed(self.seed, k),
        }
    }

    /// Single sample `k`.
    pub fn pair(&self, k: u64) -> Result<SolutionPair> {
        self.sample(&mut self.operator(), k)
    }

    /// Samples `range`, computed in parallel and returned in index order.
    pub fn generate(&self, range: Range<u64>) -> Result<Vec<SolutionPair>> {
        range
            .into_par_iter()
            .map_init(|| self.operator(), |op, k| self.sample(op, k))
            .collect()
    }

    /// Runs samples `range` in parallel and drops them; used for timing.
    pub fn generate_discard(&self, range: Range<u64>) -> Result<()> {
        range
            .into_par_iter()
            .map_init(|| self.operator(), |op, k| self.sample(op, k).map(drop))
            .collect()
    }
}

pub fn generate_hopss_dataset(base: &[SolutionPair], config: &HopssConfig, seed: u64) -> Result<Vec<SolutionPair>> {
    HopssGenerator::new(base, *config, seed)?.generate(0..config.count as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distinct_pairs_cover_all_ordered_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = [[0usize; 4]; 4];
        for _ in 0..4000 {
            let (i, j) = PairPolicy::UniformDistinct.draw(4, &mut rng);
            assert_ne!(i, j);
            seen[i][j] += 1;
        }
        for (i, row) in seen.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if i != j {
                    assert!((250..420).contains(&c), "({i},{j}) drawn {c} times");
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(HopssConfig::default().validate().is_ok());
        let bad = |mu, count| HopssConfig {
            mu,
            count,
            ..HopssConfig::default()
        };
        assert!(bad(1.0, 1).validate().is_err());
        assert!(bad(-1e-3, 1).validate().is_err());
        assert!(bad(f64::NAN, 1).validate().is_err());
        assert!(bad(1e-3, 0).validate().is_err());
    }
}
