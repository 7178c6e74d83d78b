//! Semi-implicit Crank–Nicolson pseudo-spectral time stepping.
//!
//! Every PDE is written as `u_t = L u + N₀(u) + f` with `L` diagonal in
//! Fourier space. One step is, mode by mode,
//!
//! ```text
//! û⁺ = [(1 + L̂ Δt/2) û + Δt (N̂₀(u) + f̂)] / (1 − L̂ Δt/2)
//! ```
//!
//! with the nonlinear term evaluated pseudo-spectrally at the old state and
//! truncated by the 2/3 rule.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{derivative_factor, streamfunction_in_place, Complex64, Field, Mode, SpatialGrid, Spectral};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PdeSpec {
    /// 2D incompressible Navier–Stokes in vorticity form on the torus.
    Ns2d { nu: f64 },
    /// 1D viscous Burgers with viscosity `1 / reynolds`.
    Burgers { reynolds: f64 },
    /// 1D forced KdV: `u_t + λ u_x + 2α u u_x + β u_xxx = f'`.
    Kdv {
        lambda_adv: f64,
        alpha_nl: f64,
        beta_disp: f64,
    },
}

impl PdeSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PdeSpec::Ns2d { nu } if !(nu > 0.0 && nu.is_finite()) => {
                Err(Error::param(format!("viscosity must be > 0, got {nu}")))
            }
            PdeSpec::Burgers { reynolds } if !(reynolds > 0.0 && reynolds.is_finite()) => {
                Err(Error::param(format!("Reynolds number must be > 0, got {reynolds}")))
            }
            PdeSpec::Kdv {
                lambda_adv,
                alpha_nl,
                beta_disp,
            } if ![lambda_adv, alpha_nl, beta_disp].iter().all(|v| v.is_finite()) => {
                Err(Error::param("KdV coefficients must be finite"))
            }
            _ => Ok(()),
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            PdeSpec::Ns2d { .. } => 2,
            PdeSpec::Burgers { .. } | PdeSpec::Kdv { .. } => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PdeSpec::Ns2d { .. } => "ns2d",
            PdeSpec::Burgers { .. } => "burgers",
            PdeSpec::Kdv { .. } => "kdv",
        }
    }

    /// Fourier symbol of the implicit linear operator `L`.
    pub fn linear_symbol(&self, m: &Mode) -> Complex64 {
        match *self {
            PdeSpec::Ns2d { nu } => Complex64::new(-nu * m.k_squared(), 0.0),
            PdeSpec::Burgers { reynolds } => Complex64::new(-m.k[0] * m.k[0] / reynolds, 0.0),
            PdeSpec::Kdv {
                lambda_adv,
                beta_disp,
                ..
            } => {
                -beta_disp * derivative_factor(m.k[0], m.nyquist[0], 3)
                    - lambda_adv * derivative_factor(m.k[0], m.nyquist[0], 1)
            }
        }
    }
}

/// How the quadratic term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearForm {
    /// `u·∇u` style products of the field with its derivatives.
    #[default]
    Convective,
    /// Divergence of the flux, e.g. `∂ₓ(u²/2)`.
    Conservative,
    /// Linear problem only (diagnostics).
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Abort once any value exceeds this magnitude.
    pub blowup_cap: f64,
    pub nonlinear: NonlinearForm,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            blowup_cap: 1e8,
            nonlinear: NonlinearForm::Convective,
        }
    }
}

/// Solution frames at a uniform time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: SpatialGrid,
    dt: f64,
    t0: f64,
    frames: Vec<Field>,
}

impl Trajectory {
    pub fn new(frames: Vec<Field>, dt: f64, t0: f64) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::shape("trajectory needs at least one frame"))?;
        let grid = first.grid();
        if let Some(bad) = frames.iter().position(|f| f.grid() != grid) {
            return Err(Error::shape(format!("frame {bad} is on a different grid")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param(format!("dt must be > 0, got {dt}")));
        }
        Ok(Trajectory { grid, dt, t0, frames })
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn frames(&self) -> &[Field] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn into_frames(self) -> Vec<Field> {
        self.frames
    }

    pub fn max_abs(&self) -> f64 {
        self.frames.iter().fold(0.0, |m, f| m.max(f.max_abs()))
    }

    /// Max-norm difference over all frames.
    pub fn max_abs_diff(&self, other: &Trajectory) -> f64 {
        self.frames
            .iter()
            .zip(&other.frames)
            .fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }

    /// Errors unless grid, frame count and dt agree.
    pub fn ensure_aligned(&self, other: &Trajectory) -> Result<()> {
        if self.grid != other.grid || self.frames.len() != other.frames.len() || self.dt != other.dt {
            return Err(Error::shape(format!(
                "trajectories not aligned: ({:?}, {} frames, dt {}) vs ({:?}, {} frames, dt {})",
                self.grid,
                self.frames.len(),
                self.dt,
                other.grid,
                other.frames.len(),
                other.dt
            )));
        }
        Ok(())
    }
}

pub(crate) fn max_abs_or_nan(values: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for v in values {
        if v.is_nan() {
            return f64::NAN;
        }
        m = m.max(v.abs());
    }
    m
}

/// Linear symbol plus pseudo-spectral nonlinear term for one PDE on one grid.
#[derive(Clone)]
pub struct Operator {
    spec: PdeSpec,
    form: NonlinearForm,
    sp: Spectral,
    linear: Vec<Complex64>,
    phys: [Vec<f64>; 5],
    tmp: [Vec<Complex64>; 2],
}

impl Operator {
    pub fn new(spec: PdeSpec, grid: SpatialGrid, form: NonlinearForm) -> Result<Self> {
        spec.validate()?;
        if spec.dims() != grid.dims() {
            return Err(Error::shape(format!(
                "{} needs a {}D grid, got {}D",
                spec.name(),
                spec.dims(),
                grid.dims()
            )));
        }
        let sp = Spectral::new(grid);
        let linear = sp.modes().iter().map(|m| spec.linear_symbol(m)).collect();
        let np = grid.len();
        let ns = grid.spectral_len();
        Ok(Operator {
            spec,
            form,
            sp,
            linear,
            phys: std::array::from_fn(|_| vec![0.0; np]),
            tmp: std::array::from_fn(|_| vec![ZERO; ns]),
        })
    }

    pub fn spec(&self) -> PdeSpec {
        self.spec
    }

    pub fn grid(&self) -> SpatialGrid {
        self.sp.grid()
    }

    pub fn linear(&self) -> &[Complex64] {
        &self.linear
    }

    pub fn spectral(&mut self) -> &mut Spectral {
        &mut self.sp
    }

    /// Writes the dealiased forcing-free nonlinear term `N̂₀(u)` into `out`
    /// and returns `max|u|` of the physical state (NaN if it holds a NaN).
    pub fn nonlinear(&mut self, u_hat: &[Complex64], out: &mut [Complex64]) -> f64 {
        match self.spec {
            PdeSpec::Ns2d { .. } => self.nonlinear_ns(u_hat, out),
            PdeSpec::Burgers { .. } => self.nonlinear_1d(u_hat, out, 1.0),
            PdeSpec::Kdv { alpha_nl, .. } => self.nonlinear_1d(u_hat, out, 2.0 * alpha_nl),
        }
    }

    /// `N₀(u) = −c u u_x`.
    fn nonlinear_1d(&mut self, u_hat: &[Complex64], out: &mut [Complex64], c: f64) -> f64 {
        let Operator { sp, phys, tmp, form, .. } = self;
        let [u, ux, ..] = phys;
        sp.inverse_into(u_hat, u);
        let umax = max_abs_or_nan(u);
        match form {
            NonlinearForm::Convective => {
                tmp[0].copy_from_slice(u_hat);
                sp.apply_derivative(&mut tmp[0], 1, 0);
                sp.inverse_into(&tmp[0], ux);
                for (p, a) in ux.iter_mut().zip(u.iter()) {
                    *p *= -c * a;
                }
                sp.forward_into(ux, out);
                sp.dealias_in_place(out);
            }
            NonlinearForm::Conservative => {
                for (p, a) in ux.iter_mut().zip(u.iter()) {
                    *p = -0.5 * c * a * a;
                }
                sp.forward_into(ux, out);
                sp.dealias_in_place(out);
                sp.apply_derivative(out, 1, 0);
            }
            NonlinearForm::Off => out.fill(ZERO),
        }
        umax
    }

    /// `N₀(w) = −u·∇w` with `u` recovered from the streamfunction.
    fn nonlinear_ns(&mut self, w_hat: &[Complex64], out: &mut [Complex64]) -> f64 {
        let Operator { sp, phys, tmp, form, .. } = self;
        let [w, vx, vy, a, b] = phys;
        sp.inverse_into(w_hat, w);
        let wmax = max_abs_or_nan(w);
        if *form == NonlinearForm::Off {
            out.fill(ZERO);
            return wmax;
        }

        // velocity
        tmp[0].copy_from_slice(w_hat);
        streamfunction_in_place(sp.modes(), &mut tmp[0]);
        let [t0, t1] = tmp;
        t1.copy_from_slice(t0);
        sp.apply_derivative(&mut tmp[0], 1, 1);
        sp.inverse_into(&tmp[0], vx);
        sp.apply_derivative(&mut tmp[1], 1, 0);
        sp.inverse_into(&tmp[1], vy);
        vy.iter_mut().for_each(|v| *v = -*v);

        match form {
            NonlinearForm::Convective => {
                tmp[0].copy_from_slice(w_hat);
                sp.apply_derivative(&mut tmp[0], 1, 0);
                sp.inverse_into(&tmp[0], a);
                tmp[0].copy_from_slice(w_hat);
                sp.apply_derivative(&mut tmp[0], 1, 1);
                sp.inverse_into(&tmp[0], b);
                for i in 0..a.len() {
                    a[i] = -(vx[i] * a[i] + vy[i] * b[i]);
                }
                sp.forward_into(a, out);
                sp.dealias_in_place(out);
            }
            NonlinearForm::Conservative => {
                for i in 0..a.len() {
                    a[i] = vx[i] * w[i];
                    b[i] = vy[i] * w[i];
                }
                sp.forward_into(a, out);
                sp.forward_into(b, &mut tmp[1]);
                sp.apply_derivative(out, 1, 0);
                sp.apply_derivative(&mut tmp[1], 1, 1);
                for (o, t) in out.iter_mut().zip(tmp[1].iter()) {
                    *o = -(*o + *t);
                }
                sp.dealias_in_place(out);
            }
            NonlinearForm::Off => unreachable!(),
        }
        wmax
    }
}

/// One-step propagator with the CN factors for a fixed `dt` precomputed.
#[derive(Clone)]
pub struct Stepper {
    op: Operator,
    dt: f64,
    cap: f64,
    explicit: Vec<Complex64>,
    implicit: Vec<Complex64>,
    n_hat: Vec<Complex64>,
}

impl Stepper {
    pub fn new(spec: PdeSpec, grid: SpatialGrid, dt: f64, options: SolverOptions) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param(format!("dt must be > 0, got {dt}")));
        }
        let op = Operator::new(spec, grid, options.nonlinear)?;
        let half = 0.5 * dt;
        let explicit = op.linear().iter().map(|l| 1.0 + l * half).collect();
        let implicit = op.linear().iter().map(|l| 1.0 - l * half).collect();
        Ok(Stepper {
            op,
            dt,
            cap: options.blowup_cap,
            explicit,
            implicit,
            n_hat: vec![ZERO; grid.spectral_len()],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn operator(&mut self) -> &mut Operator {
        &mut self.op
    }

    /// Advances `u_hat` in place and returns `max|u|` of the state it started from.
    pub fn advance(&mut self, u_hat: &mut [Complex64], f_hat: &[Complex64]) -> f64 {
        let umax = self.op.nonlinear(u_hat, &mut self.n_hat);
        let dt = self.dt;
        for i in 0..u_hat.len() {
            u_hat[i] = (self.explicit[i] * u_hat[i] + dt * (self.n_hat[i] + f_hat[i])) / self.implicit[i];
        }
        umax
    }

    fn check(&self, step: usize, value: f64) -> Result<()> {
        if value <= self.cap {
            Ok(())
        } else {
            Err(Error::BlowUp { step, value })
        }
    }

    /// Integrates `steps` steps, recording every `record_stride`-th state.
    pub fn run(&mut self, ic: &Field, forcing: &Field, steps: usize, record_stride: usize) -> Result<Run> {
        let grid = self.op.grid();
        if ic.grid() != grid || forcing.grid() != grid {
            return Err(Error::shape("initial condition and forcing must be on the solver grid"));
        }
        if steps == 0 || record_stride == 0 || !steps.is_multiple_of(record_stride) {
            return Err(Error::param(format!(
                "record stride {record_stride} must divide step count {steps}"
            )));
        }
        let start = Instant::now();
        let sp = self.op.spectral();
        let mut u_hat = vec![ZERO; grid.spectral_len()];
        let mut f_hat = vec![ZERO; grid.spectral_len()];
        sp.forward_into(ic.values(), &mut u_hat);
        sp.forward_into(forcing.values(), &mut f_hat);

        let mut frames = Vec::with_capacity(steps / record_stride + 1);
        frames.push(ic.clone());
        for step in 1..=steps {
            let prev = self.advance(&mut u_hat, &f_hat);
            self.check(step - 1, prev)?;
            if step % record_stride == 0 {
                let mut out = vec![0.0; grid.len()];
                self.op.spectral().inverse_into(&u_hat, &mut out);
                self.check(step, max_abs_or_nan(&out))?;
                frames.push(Field::from_vec_unchecked(grid, out));
            }
        }
        let elapsed = start.elapsed();
        let trajectory = Trajectory::new(frames, self.dt * record_stride as f64, 0.0)?;
        Ok(Run {
            trajectory,
            steps,
            elapsed,
        })
    }
}

/// Output of [`Stepper::run`] with wall-time instrumentation.
#[derive(Debug, Clone)]
pub struct Run {
    pub trajectory: Trajectory,
    pub steps: usize,
    pub elapsed: Duration,
}

impl Run {
    pub fn seconds_per_step(&self) -> f64 {
        self.elapsed.as_secs_f64() / self.steps as f64
    }
}

/// Single semi-implicit CN step with default options.
pub fn cn_step(u_n: &Field, forcing: &Field, spec: PdeSpec, dt: f64) -> Result<Field> {
    cn_step_with(u_n, forcing, spec, dt, SolverOptions::default())
}

pub fn cn_step_with(
    u_n: &Field,
    forcing: &Field,
    spec: PdeSpec,
    dt: f64,
    options: SolverOptions,
) -> Result<Field> {
    u_n.ensure_same_grid(forcing)?;
    let traj = Stepper::new(spec, u_n.grid(), dt, options)?.run(u_n, forcing, 1, 1)?.trajectory;
    Ok(traj.into_frames().pop().expect("two frames"))
}

/// Fine time stepping from `ic`, keeping every `record_stride`-th state; the
/// returned trajectory has `steps / record_stride + 1` frames at
/// `dt * record_stride` spacing.
pub fn solve_trajectory(
    spec: PdeSpec,
    ic: &Field,
    forcing: &Field,
    steps: usize,
    dt: f64,
    record_stride: usize,
    options: SolverOptions,
) -> Result<Run> {
    Stepper::new(spec, ic.grid(), dt, options)?.run(ic, forcing, steps, record_stride)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward, inverse, make_grid};
    use std::f64::consts::PI;

    const NS: PdeSpec = PdeSpec::Ns2d { nu: 1e-4 };
    const BURGERS: PdeSpec = PdeSpec::Burgers { reynolds: 1000.0 };
    const KDV: PdeSpec = PdeSpec::Kdv {
        lambda_adv: 0.0,
        alpha_nl: -0.5,
        beta_disp: -1.0,
    };

    fn smooth_1d(n: usize) -> Field {
        let g = make_grid(1, n, 1.0).unwrap();
        Field::from_fn(g, |x| 0.3 * (2.0 * PI * x[0]).sin() + 0.1 * (4.0 * PI * x[0]).cos())
    }

    #[test]
    fn zero_is_a_fixed_point() {
        for (spec, dims) in [(NS, 2), (BURGERS, 1), (KDV, 1)] {
            let g = make_grid(dims, 16, 1.0).unwrap();
            let z = Field::zeros(g);
            let out = cn_step(&z, &z, spec, 1e-3).unwrap();
            assert!(out.values().iter().all(|&v| v == 0.0), "{}", spec.name());
        }
    }

    #[test]
    fn burgers_constant_state_is_steady() {
        let g = make_grid(1, 32, 1.0).unwrap();
        let u = Field::constant(g, 0.7);
        let out = cn_step(&u, &Field::zeros(g), BURGERS, 5e-3).unwrap();
        assert!(out.max_abs_diff(&u) <= 1e-14);
    }

    #[test]
    fn ns_linear_step_matches_scalar_amplification() {
        let g = make_grid(2, 32, 1.0).unwrap();
        let nu = 1e-2;
        let dt = 0.05;
        let w = Field::from_fn(g, |x| {
            (2.0 * PI * x[0]).sin() * (4.0 * PI * x[1]).cos() + 0.5 * (6.0 * PI * (x[0] + x[1])).sin()
        });
        let opts = SolverOptions {
            nonlinear: NonlinearForm::Off,
            ..Default::default()
        };
        let stepped = cn_step_with(&w, &Field::zeros(g), PdeSpec::Ns2d { nu }, dt, opts).unwrap();

        // Oracle: per-mode scalar factor (1 − νk²Δt/2)/(1 + νk²Δt/2).
        let mut s = forward(&w);
        let n = g.n();
        let half = n / 2 + 1;
        for (idx, c) in s.data_mut().iter_mut().enumerate() {
            let kx = g.wavenumber(idx / half);
            let ky = 2.0 * PI * (idx % half) as f64;
            let a = nu * (kx * kx + ky * ky) * dt / 2.0;
            *c *= (1.0 - a) / (1.0 + a);
        }
        let oracle = inverse(&s);
        assert!(stepped.max_abs_diff(&oracle) <= 1e-12);
    }

    #[test]
    fn one_step_trajectory_matches_cn_step() {
        let g = make_grid(1, 64, 1.0).unwrap();
        let ic = smooth_1d(64);
        let zero = Field::zeros(g);
        for spec in [BURGERS, KDV] {
            let run = solve_trajectory(spec, &ic, &zero, 1, 1e-3, 1, SolverOptions::default()).unwrap();
            assert_eq!(run.trajectory.len(), 2);
            assert_eq!(run.trajectory.frames()[0], ic);
            let direct = cn_step(&ic, &zero, spec, 1e-3).unwrap();
            assert_eq!(run.trajectory.frames()[1], direct);
        }
    }

    #[test]
    fn recording_stride_and_frame_count() {
        let g = make_grid(2, 16, 1.0).unwrap();
        let ic = Field::from_fn(g, |x| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin());
        let f = Field::zeros(g);
        let run = solve_trajectory(NS, &ic, &f, 40, 1e-3, 4, SolverOptions::default()).unwrap();
        assert_eq!(run.trajectory.len(), 11);
        assert!((run.trajectory.dt() - 4e-3).abs() < 1e-18);
        assert!(solve_trajectory(NS, &ic, &f, 40, 1e-3, 7, SolverOptions::default()).is_err());
    }

    #[test]
    fn strided_recording_equals_unstrided_subsample() {
        let ic = smooth_1d(64);
        let f = Field::from_fn(ic.grid(), |x| 0.2 * (2.0 * PI * x[0]).cos());
        let fine = solve_trajectory(BURGERS, &ic, &f, 20, 1e-3, 1, SolverOptions::default()).unwrap();
        let coarse = solve_trajectory(BURGERS, &ic, &f, 20, 1e-3, 5, SolverOptions::default()).unwrap();
        for (j, frame) in coarse.trajectory.frames().iter().enumerate() {
            assert_eq!(frame, &fine.trajectory.frames()[5 * j]);
        }
    }

    #[test]
    fn blow_up_reports_step() {
        let ic = smooth_1d(32);
        let f = Field::constant(ic.grid(), 0.0);
        let opts = SolverOptions {
            blowup_cap: 0.2,
            ..Default::default()
        };
        let err = solve_trajectory(BURGERS, &ic, &f, 10, 1e-3, 1, opts).unwrap_err();
        assert!(matches!(err, Error::BlowUp { step: 0, .. }), "{err}");

        let big = Field::constant(ic.grid(), 1.0);
        let opts = SolverOptions {
            blowup_cap: 1.55,
            ..Default::default()
        };
        let err = solve_trajectory(BURGERS, &Field::zeros(ic.grid()), &big, 100, 0.1, 1, opts).unwrap_err();
        // u grows by 0.1 per step under unit forcing
        assert!(matches!(err, Error::BlowUp { step: 16, .. }), "{err}");
    }

    #[test]
    fn rejects_grid_mismatch() {
        let g1 = make_grid(1, 16, 1.0).unwrap();
        let g2 = make_grid(2, 16, 1.0).unwrap();
        assert!(cn_step(&Field::zeros(g2), &Field::zeros(g2), BURGERS, 1e-3).is_err());
        assert!(cn_step(&Field::zeros(g1), &Field::zeros(g1), NS, 1e-3).is_err());
        assert!(cn_step(&Field::zeros(g1), &Field::zeros(g1), PdeSpec::Burgers { reynolds: 0.0 }, 1e-3).is_err());
    }

    #[test]
    fn conservative_and_convective_agree_on_resolved_data() {
        let g = make_grid(2, 32, 1.0).unwrap();
        let ic = Field::from_fn(g, |x| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos() + (2.0 * PI * x[1]).sin());
        let f = Field::zeros(g);
        let a = cn_step(&ic, &f, NS, 1e-2).unwrap();
        let opts = SolverOptions {
            nonlinear: NonlinearForm::Conservative,
            ..Default::default()
        };
        let b = cn_step_with(&ic, &f, NS, 1e-2, opts).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn kdv_conserves_mean() {
        let g = make_grid(1, 64, 1.0).unwrap();
        let ic = Field::from_fn(g, |x| 0.5 + 0.2 * (2.0 * PI * x[0]).sin() + 0.1 * (6.0 * PI * x[0]).cos());
        let run = solve_trajectory(KDV, &ic, &Field::zeros(g), 1000, 1e-5, 1000, SolverOptions::default()).unwrap();
        let end = &run.trajectory.frames()[1];
        assert!((end.mean() - ic.mean()).abs() <= 1e-10);
        assert!(end.max_abs_diff(&ic) > 1e-6, "state should have evolved");
    }

    #[test]
    fn deterministic() {
        let ic = smooth_1d(64);
        let f = Field::from_fn(ic.grid(), |x| (2.0 * PI * x[0]).cos());
        let a = solve_trajectory(KDV, &ic, &f, 50, 1e-4, 10, SolverOptions::default()).unwrap();
        let b = solve_trajectory(KDV, &ic, &f, 50, 1e-4, 10, SolverOptions::default()).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
    }
}
