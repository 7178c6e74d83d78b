//! Homologous perturbation of trajectories and the matching forcing update.

use crate::error::{Error, Result};
use crate::solver::{NonlinearForm, PdeSpec, Trajectory};
use crate::spectral::Field;

use super::residual::discrete_residual_with;

/// `u_new[n] = u_i[n] + μ·u_j[n] + ξ` for every frame.
///
/// Terms that are exactly zero are skipped, so `μ = 0, ξ = 0` returns `u_i`
/// bit for bit.
pub fn homologous_perturb(u_i: &Trajectory, u_j: &Trajectory, mu: f64, xi: &Field) -> Result<Trajectory> {
    u_i.ensure_aligned(u_j)?;
    if xi.grid() != u_i.grid() {
        return Err(Error::shape("noise field is not on the trajectory grid"));
    }
    if !mu.is_finite() {
        return Err(Error::param(format!("mu must be finite, got {mu}")));
    }
    let noisy = xi.max_abs() != 0.0;
    let frames = u_i
        .frames()
        .iter()
        .zip(u_j.frames())
        .map(|(a, b)| {
            let mut values = a.values().to_vec();
            if mu != 0.0 {
                values.iter_mut().zip(b.values()).for_each(|(v, b)| *v += mu * b);
            }
            if noisy {
                values.iter_mut().zip(xi.values()).for_each(|(v, x)| *v += x);
            }
            Field::new(a.grid(), values).map_err(|_| Error::NonFinite)
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(frames, u_i.dt(), u_i.t0())
}

/// `f_new = f_i + R(u_new) − R(u_i)` over every step interval.
pub fn rhs_variation(u_new: &Trajectory, u_i: &Trajectory, f_i: &Trajectory, spec: PdeSpec) -> Result<Trajectory> {
    rhs_variation_with(u_new, u_i, f_i, spec, NonlinearForm::default())
}

pub fn rhs_variation_with(
    u_new: &Trajectory,
    u_i: &Trajectory,
    f_i: &Trajectory,
    spec: PdeSpec,
    form: NonlinearForm,
) -> Result<Trajectory> {
    u_new.ensure_aligned(u_i)?;
    let r_new = discrete_residual_with(u_new, spec, form)?;
    let r_i = discrete_residual_with(u_i, spec, form)?;
    apply_variation(f_i, &r_new, &r_i)
}

/// `f + (r_new − r_old)` frame by frame; intervals where the residuals agree
/// exactly keep `f` untouched.
pub(crate) fn apply_variation(f: &Trajectory, r_new: &Trajectory, r_old: &Trajectory) -> Result<Trajectory> {
    if f.len() != r_new.len() || f.grid() != r_new.grid() {
        return Err(Error::shape(format!(
            "forcing has {} frames, expected {} per-interval frames",
            f.len(),
            r_new.len()
        )));
    }
    let frames = f
        .frames()
        .iter()
        .zip(r_new.frames().iter().zip(r_old.frames()))
        .map(|(f, (a, b))| {
            let values = f
                .values()
                .iter()
                .zip(a.values().iter().zip(b.values()))
                .map(|(&f, (&a, &b))| {
                    let d = a - b;
                    if d == 0.0 {
                        f
                    } else {
                        f + d
                    }
                })
                .collect();
            Field::new(f.grid(), values).map_err(|_| Error::NonFinite)
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(frames, f.dt(), f.t0())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    fn wave(frames: usize) -> Trajectory {
        let g = make_grid(1, 32, 1.0).unwrap();
        let fr = (0..frames)
            .map(|t| Field::from_fn(g, |x| (2.0 * PI * (x[0] - 0.1 * t as f64)).sin()))
            .collect();
        Trajectory::new(fr, 0.1, 0.0).unwrap()
    }

    #[test]
    fn identity_when_unperturbed() {
        let u = wave(4);
        let z = Field::zeros(u.grid());
        let out = homologous_perturb(&u, &wave(4), 0.0, &z).unwrap();
        for (a, b) in out.frames().iter().zip(u.frames()) {
            let bits = |f: &Field| f.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(a), bits(b));
        }
    }

    #[test]
    fn self_perturbation_scales() {
        let u = wave(3);
        let out = homologous_perturb(&u, &u, 1e-3, &Field::zeros(u.grid())).unwrap();
        for (a, b) in out.frames().iter().zip(u.frames()) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - 1.001 * y).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let u = wave(3);
        assert!(homologous_perturb(&u, &wave(4), 1e-3, &Field::zeros(u.grid())).is_err());
        let other = Field::zeros(make_grid(1, 16, 1.0).unwrap());
        assert!(homologous_perturb(&u, &u, 1e-3, &other).is_err());
    }

    #[test]
    fn zero_variation_keeps_forcing_bits() {
        let u = wave(3);
        let spec = PdeSpec::Burgers { reynolds: 100.0 };
        let mut f = discrete_residual_with(&u, spec, NonlinearForm::Convective).unwrap();
        // a negative zero must survive untouched
        let g = f.grid();
        let mut frames = f.into_frames();
        let mut v = frames[0].values().to_vec();
        v[0] = -0.0;
        frames[0] = Field::new(g, v).unwrap();
        f = Trajectory::new(frames, 0.1, 0.0).unwrap();
        let out = rhs_variation(&u, &u, &f, spec).unwrap();
        assert_eq!(out.frames()[0].values()[0].to_bits(), (-0.0f64).to_bits());
        assert_eq!(out, f);
    }
}
