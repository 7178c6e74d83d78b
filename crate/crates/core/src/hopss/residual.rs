//! Discrete residual of the coarse semi-implicit CN relation.
//!
//! For frames `n, n+1` of a trajectory at spacing `dt`,
//!
//! ```text
//! R(u)[n] = [(1 − L dt/2) u[n+1] − (1 + L dt/2) u[n]] / dt − N₀(u[n])
//! ```
//!
//! evaluated mode-wise, with `N₀` the forcing-free nonlinear term of the PDE.
//! `R` is the forcing that one CN step at `dt` would need to map `u[n]` onto
//! `u[n+1]`, so it inverts [`cn_step`](crate::solver::cn_step) exactly.

use crate::error::{Error, Result};
use crate::solver::{NonlinearForm, Operator, PdeSpec, Trajectory};
use crate::spectral::{Complex64, Field, SpatialGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reusable residual evaluator for one `(spec, grid, dt)`.
#[derive(Clone)]
pub struct ResidualOperator {
    op: Operator,
    dt: f64,
    explicit: Vec<Complex64>,
    implicit: Vec<Complex64>,
    cur: Vec<Complex64>,
    next: Vec<Complex64>,
    n_hat: Vec<Complex64>,
    out: Vec<Complex64>,
}

impl ResidualOperator {
    pub fn new(spec: PdeSpec, grid: SpatialGrid, dt: f64, form: NonlinearForm) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param(format!("dt must be > 0, got {dt}")));
        }
        let op = Operator::new(spec, grid, form)?;
        let half = 0.5 * dt;
        let explicit = op.linear().iter().map(|l| 1.0 + l * half).collect();
        let implicit = op.linear().iter().map(|l| 1.0 - l * half).collect();
        let ns = grid.spectral_len();
        Ok(ResidualOperator {
            op,
            dt,
            explicit,
            implicit,
            cur: vec![ZERO; ns],
            next: vec![ZERO; ns],
            n_hat: vec![ZERO; ns],
            out: vec![ZERO; ns],
        })
    }

    pub fn spec(&self) -> PdeSpec {
        self.op.spec()
    }

    pub fn grid(&self) -> SpatialGrid {
        self.op.grid()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Whether this evaluator can be reused for `u`.
    pub fn matches(&self, u: &Trajectory) -> bool {
        u.grid() == self.grid() && u.dt() == self.dt
    }

    /// One forcing field per step interval of `u`.
    pub fn residual(&mut self, u: &Trajectory) -> Result<Trajectory> {
        if u.len() < 2 {
            return Err(Error::shape("residual needs at least two frames"));
        }
        if u.grid() != self.grid() {
            return Err(Error::shape("trajectory grid differs from residual operator grid"));
        }
        if u.dt() != self.dt {
            return Err(Error::param(format!(
                "trajectory dt {} differs from residual operator dt {}",
                u.dt(),
                self.dt
            )));
        }
        let grid = self.grid();
        let inv_dt = 1.0 / self.dt;
        let frames = u.frames();
        let mut forcing = Vec::with_capacity(frames.len() - 1);
        self.op.spectral().forward_into(frames[0].values(), &mut self.cur);
        for next in &frames[1..] {
            self.op.spectral().forward_into(next.values(), &mut self.next);
            self.op.nonlinear(&self.cur, &mut self.n_hat);
            for i in 0..self.out.len() {
                self.out[i] = (self.implicit[i] * self.next[i] - self.explicit[i] * self.cur[i]) * inv_dt
                    - self.n_hat[i];
            }
            let mut values = vec![0.0; grid.len()];
            self.op.spectral().inverse_into(&self.out, &mut values);
            forcing.push(Field::new(grid, values).map_err(|_| Error::NonFinite)?);
            std::mem::swap(&mut self.cur, &mut self.next);
        }
        Trajectory::new(forcing, u.dt(), u.t0())
    }
}

pub fn discrete_residual(u: &Trajectory, spec: PdeSpec) -> Result<Trajectory> {
    discrete_residual_with(u, spec, NonlinearForm::default())
}

pub fn discrete_residual_with(u: &Trajectory, spec: PdeSpec, form: NonlinearForm) -> Result<Trajectory> {
    if u.len() < 2 {
        return Err(Error::shape("residual needs at least two frames"));
    }
    ResidualOperator::new(spec, u.grid(), u.dt(), form)?.residual(u)
}
