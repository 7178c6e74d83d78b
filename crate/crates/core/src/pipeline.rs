//! Traditional generation and the generation records stored in manifests.
//!
//! A traditional sample draws its initial condition and then its forcing
//! from `sample_rng(seed, k)`, integrates on the fine grid while recording
//! every `stride`-th state, coarsens space by `coarsen`, and attaches a
//! forcing at the coarse resolution.

use std::ops::Range;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grf::{sample_grf, GrfParams};
use crate::hopss::{HopssConfig, HopssGenerator, ResidualOperator};
use crate::pair::{Forcing, ForcingLayout, Provenance, SolutionPair};
use crate::resample::{downsample_field, downsample_space_with, SpatialDownsample};
use crate::rng::sample_rng;
use crate::solver::{NonlinearForm, PdeSpec, SolverOptions, Stepper};
use crate::spectral::{Field, SpatialGrid};

/// Initial state of each traditional sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    Zero,
    Grf(GrfParams),
}

/// Forcing stored with a coarse base pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseForcing {
    /// `R(u)` on the coarse grid, one field per interval; exactly consistent
    /// with the coarse discrete equation.
    #[default]
    Residual,
    /// The sampled fine forcing, coarsened like `u`.
    Downsampled,
}

fn default_length() -> f64 {
    1.0
}

fn default_cap() -> f64 {
    SolverOptions::default().blowup_cap
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraditionConfig {
    pub pde: PdeSpec,
    /// Fine grid points per dimension.
    pub n: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    /// Fine time step.
    pub dt: f64,
    /// Fine step count.
    pub steps: usize,
    /// Fine steps per recorded frame.
    pub stride: usize,
    /// Spatial coarsening factor.
    pub coarsen: usize,
    #[serde(default)]
    pub spatial_downsample: SpatialDownsample,
    pub initial: InitialCondition,
    pub forcing: GrfParams,
    pub count: usize,
    #[serde(default)]
    pub base_forcing: BaseForcing,
    #[serde(default)]
    pub nonlinear: NonlinearForm,
    #[serde(default = "default_cap")]
    pub blowup_cap: f64,
}

impl TraditionConfig {
    /// 2D Navier–Stokes, 128² fine grid, 10⁴ steps of 10⁻³ recorded every
    /// 500 steps, coarsened to 64².
    pub fn navier_stokes() -> Self {
        TraditionConfig {
            pde: PdeSpec::Ns2d { nu: 1e-4 },
            n: 128,
            length: 1.0,
            dt: 1e-3,
            steps: 10_000,
            stride: 500,
            coarsen: 2,
            spatial_downsample: SpatialDownsample::Subsample,
            initial: InitialCondition::Grf(GrfParams::new(2.0, 2.5, 10.0)),
            forcing: GrfParams::new(2.0, 2.5, 2.0),
            count: 100,
            base_forcing: BaseForcing::Residual,
            nonlinear: NonlinearForm::Convective,
            blowup_cap: default_cap(),
        }
    }

    /// Navier–Stokes directly on a 64² grid with 2000 steps of 5·10⁻³.
    pub fn navier_stokes_desk() -> Self {
        TraditionConfig {
            n: 64,
            dt: 5e-3,
            steps: 2000,
            stride: 100,
            coarsen: 1,
            ..Self::navier_stokes()
        }
    }

    /// Burgers at `R = 1000`, 1024 points, `dt = 5·10⁻³` recorded every 10
    /// steps, coarsened to 64 points. Trajectories start from rest and are
    /// driven by the forcing alone; a `σ = 49` initial draw is unstable at this
    /// step size with the nonlinear term treated explicitly.
    pub fn burgers() -> Self {
        TraditionConfig {
            pde: PdeSpec::Burgers { reynolds: 1000.0 },
            n: 1024,
            length: 1.0,
            dt: 5e-3,
            steps: 200,
            stride: 10,
            coarsen: 16,
            spatial_downsample: SpatialDownsample::Subsample,
            initial: InitialCondition::Zero,
            forcing: GrfParams::new(7.0, 2.5, 49.0),
            count: 500,
            base_forcing: BaseForcing::Residual,
            nonlinear: NonlinearForm::Convective,
            blowup_cap: default_cap(),
        }
    }

    /// Forced KdV with `λ = 0, α = −0.5, β = −1`, 512 points, 10⁴ steps
    /// recorded every 500, coarsened to 64 points.
    pub fn kdv() -> Self {
        TraditionConfig {
            pde: PdeSpec::Kdv {
                lambda_adv: 0.0,
                alpha_nl: -0.5,
                beta_disp: -1.0,
            },
            n: 512,
            length: 1.0,
            dt: 1e-4,
            steps: 10_000,
            stride: 500,
            coarsen: 8,
            spatial_downsample: SpatialDownsample::Subsample,
            initial: InitialCondition::Grf(GrfParams::new(5.0, 2.5, 1.0)),
            forcing: GrfParams::new(5.0, 2.5, 1.0),
            count: 500,
            base_forcing: BaseForcing::Residual,
            nonlinear: NonlinearForm::Convective,
            blowup_cap: default_cap(),
        }
    }

    pub fn preset(pde: &str) -> Option<Self> {
        match pde {
            "ns2d" => Some(Self::navier_stokes()),
            "burgers" => Some(Self::burgers()),
            "kdv" => Some(Self::kdv()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pde.validate()?;
        let fine = self.fine_grid()?;
        fine.coarsened(self.coarsen)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.stride == 0 || self.steps == 0 || !self.steps.is_multiple_of(self.stride) {
            return Err(Error::param(format!(
                "stride {} must divide steps {}",
                self.stride, self.steps
            )));
        }
        if let InitialCondition::Grf(p) = &self.initial {
            p.validate(fine.dims())?;
        }
        self.forcing.validate(fine.dims())?;
        if !(self.blowup_cap > 0.0) {
            return Err(Error::param("blow-up cap must be > 0"));
        }
        Ok(())
    }

    pub fn fine_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.pde.dims(), self.n, self.length)
    }

    pub fn coarse_grid(&self) -> Result<SpatialGrid> {
        self.fine_grid()?.coarsened(self.coarsen)
    }

    /// Frames per coarse trajectory, including `t = 0`.
    pub fn frames(&self) -> usize {
        self.steps / self.stride + 1
    }

    pub fn dt_coarse(&self) -> f64 {
        self.dt * self.stride as f64
    }

    pub fn forcing_layout(&self) -> ForcingLayout {
        match self.base_forcing {
            BaseForcing::Residual => ForcingLayout::PerInterval,
            BaseForcing::Downsampled => ForcingLayout::Static,
        }
    }

    fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            blowup_cap: self.blowup_cap,
            nonlinear: self.nonlinear,
        }
    }
}

/// Per-worker state for traditional generation.
#[derive(Clone)]
struct Worker {
    stepper: Stepper,
    residual: ResidualOperator,
}

/// Traditional generator for one configuration and master seed.
pub struct TraditionGenerator {
    config: TraditionConfig,
    seed: u64,
    fine: SpatialGrid,
}

impl TraditionGenerator {
    pub fn new(config: TraditionConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        Ok(TraditionGenerator {
            fine: config.fine_grid()?,
            config,
            seed,
        })
    }

    pub fn config(&self) -> &TraditionConfig {
        &self.config
    }

    fn worker(&self) -> Result<Worker> {
        let c = &self.config;
        Ok(Worker {
            stepper: Stepper::new(c.pde, self.fine, c.dt, c.solver_options())?,
            residual: ResidualOperator::new(c.pde, c.coarse_grid()?, c.dt_coarse(), c.nonlinear)?,
        })
    }

    fn sample(&self, worker: &mut Worker, k: u64) -> Result<(SolutionPair, Duration)> {
        let c = &self.config;
        let mut rng = sample_rng(self.seed, k);
        let ic = match &c.initial {
            InitialCondition::Zero => Field::zeros(self.fine),
            InitialCondition::Grf(p) => sample_grf(self.fine, p, &mut rng)?,
        };
        let forcing = sample_grf(self.fine, &c.forcing, &mut rng)?;
        let run = worker.stepper.run(&ic, &forcing, c.steps, c.stride)?;
        let u = downsample_space_with(&run.trajectory, c.coarsen, c.spatial_downsample)?;
        let f = match c.base_forcing {
            BaseForcing::Residual => Forcing::PerInterval(worker.residual.residual(&u)?),
            BaseForcing::Downsampled => {
                Forcing::Static(downsample_field(&forcing, c.coarsen, c.spatial_downsample)?)
            }
        };
        let pair = SolutionPair::new(u, f, Provenance::Base, c.pde)?;
        Ok((pair, run.elapsed))
    }

    pub fn pair(&self, k: u64) -> Result<SolutionPair> {
        Ok(self.sample(&mut self.worker()?, k)?.0)
    }

    /// Samples `range` in parallel, returned in index order.
    pub fn generate(&self, range: Range<u64>) -> Result<Vec<SolutionPair>> {
        let proto = self.worker()?;
        range
            .into_par_iter()
            .map_init(|| proto.clone(), |w, k| self.sample(w, k).map(|(p, _)| p))
            .collect()
    }

    /// Runs samples `range` and drops them; returns the summed fine-stepping
    /// time.
    pub fn generate_discard(&self, range: Range<u64>) -> Result<Duration> {
        let proto = self.worker()?;
        let times = range
            .into_par_iter()
            .map_init(|| proto.clone(), |w, k| self.sample(w, k).map(|(_, t)| t))
            .collect::<Result<Vec<_>>>()?;
        Ok(times.into_iter().sum())
    }
}

pub fn generate_tradition_dataset(config: &TraditionConfig, seed: u64) -> Result<Vec<SolutionPair>> {
    TraditionGenerator::new(*config, seed)?.generate(0..config.count as u64)
}

/// How a dataset was produced; stored in the manifest and accepted as a
/// configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Generation {
    Tradition {
        config: TraditionConfig,
        seed: u64,
    },
    Hopss {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Box<Generation>>,
        config: HopssConfig,
        seed: u64,
    },
    Mixup {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Box<Generation>>,
        count: usize,
        seed: u64,
    },
}

impl Generation {
    pub fn method(&self) -> &'static str {
        match self {
            Generation::Tradition { .. } => "tradition",
            Generation::Hopss { .. } => "hopss",
            Generation::Mixup { .. } => "mixup",
        }
    }

    pub fn sample_count(&self) -> usize {
        match self {
            Generation::Tradition { config, .. } => config.count,
            Generation::Hopss { config, .. } => config.count,
            Generation::Mixup { count, .. } => *count,
        }
    }

    pub fn base(&self) -> Option<&Generation> {
        match self {
            Generation::Tradition { .. } => None,
            Generation::Hopss { base, .. } | Generation::Mixup { base, .. } => base.as_deref(),
        }
    }

    /// Recomputes the full dataset, base included.
    pub fn regenerate(&self) -> Result<Vec<SolutionPair>> {
        match self {
            Generation::Tradition { config, seed } => generate_tradition_dataset(config, *seed),
            Generation::Hopss { base, config, seed } => {
                let base = self.regenerate_base(base)?;
                HopssGenerator::new(&base, *config, *seed)?.generate(0..config.count as u64)
            }
            Generation::Mixup { base, count, seed } => {
                let base = self.regenerate_base(base)?;
                crate::hopss::mixup_range(&base, *seed, 0..*count as u64)
            }
        }
    }

    fn regenerate_base(&self, base: &Option<Box<Generation>>) -> Result<Vec<SolutionPair>> {
        base.as_ref()
            .ok_or_else(|| Error::param(format!("{} generation record has no base record", self.method())))?
            .regenerate()
    }
}

/// Wall time of a closure.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}
