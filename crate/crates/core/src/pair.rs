use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{PdeSpec, Trajectory};
use crate::spectral::{Field, SpatialGrid};

/// Right-hand side of a solution pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    /// Time-invariant forcing field.
    Static(Field),
    /// One forcing field per step interval of the trajectory.
    PerInterval(Trajectory),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingLayout {
    Static,
    PerInterval,
}

impl Forcing {
    pub fn layout(&self) -> ForcingLayout {
        match self {
            Forcing::Static(_) => ForcingLayout::Static,
            Forcing::PerInterval(_) => ForcingLayout::PerInterval,
        }
    }

    pub fn grid(&self) -> SpatialGrid {
        match self {
            Forcing::Static(f) => f.grid(),
            Forcing::PerInterval(t) => t.grid(),
        }
    }

    pub fn frames(&self) -> &[Field] {
        match self {
            Forcing::Static(f) => std::slice::from_ref(f),
            Forcing::PerInterval(t) => t.frames(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.frames().iter().fold(0.0, |m, f| m.max(f.max_abs()))
    }

    /// Per-interval view for a trajectory `u`; static forcing is repeated.
    pub fn to_per_interval(&self, u: &Trajectory) -> Result<Trajectory> {
        match self {
            Forcing::PerInterval(t) => Ok(t.clone()),
            Forcing::Static(f) => Trajectory::new(vec![f.clone(); u.len() - 1], u.dt(), u.t0()),
        }
    }
}

/// Where a pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Produced by the traditional solver.
    Base,
    /// `u_i + μ u_j + ξ`; `seed` is the derived per-sample seed.
    Hopss { i: usize, j: usize, seed: u64 },
    Mixup { seed: u64 },
}

/// A trajectory together with the forcing that drives it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair {
    pub u: Trajectory,
    pub f: Forcing,
    pub provenance: Provenance,
    pub pde: PdeSpec,
}

impl SolutionPair {
    pub fn new(u: Trajectory, f: Forcing, provenance: Provenance, pde: PdeSpec) -> Result<Self> {
        if u.grid() != f.grid() {
            return Err(Error::shape("u and f are on different grids"));
        }
        if u.len() < 2 {
            return Err(Error::shape("solution trajectory needs at least two frames"));
        }
        if let Forcing::PerInterval(t) = &f {
            if t.len() != u.len() - 1 {
                return Err(Error::shape(format!(
                    "per-interval forcing has {} frames, expected {}",
                    t.len(),
                    u.len() - 1
                )));
            }
        }
        if pde.dims() != u.grid().dims() {
            return Err(Error::shape("pde dimension does not match grid"));
        }
        Ok(SolutionPair { u, f, provenance, pde })
    }

    pub fn forcing_per_interval(&self) -> Result<Trajectory> {
        self.f.to_per_interval(&self.u)
    }
}
