//! Uniform periodic grids, real-to-complex transforms and spectral operators.
//!
//! Spectral layout (real-input, half-spectrum convention):
//!
//! * 1D: `n/2 + 1` coefficients, index `j` holds wavenumber `2πj/length`.
//! * 2D: `n × (n/2 + 1)` coefficients, row-major. The row index runs over the
//!   full axis-0 (x) spectrum in standard FFT order, the column index over the
//!   non-negative half of axis 1 (y).
//!
//! Forward transforms are unnormalized; inverse transforms divide by the
//! number of grid points, so `inverse(forward(u)) == u` up to roundoff.
//! Odd-order derivatives zero the Nyquist coefficient so real fields stay real.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

pub use realfft::num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform periodic grid with `n` points per dimension on `[0, length)^dims`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct SpatialGrid {
    dims: usize,
    n: usize,
    length: f64,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    dims: usize,
    n: usize,
    length: f64,
}

impl TryFrom<GridRepr> for SpatialGrid {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        SpatialGrid::new(r.dims, r.n, r.length)
    }
}

impl From<SpatialGrid> for GridRepr {
    fn from(g: SpatialGrid) -> Self {
        GridRepr {
            dims: g.dims,
            n: g.n,
            length: g.length,
        }
    }
}

impl SpatialGrid {
    pub fn new(dims: usize, n: usize, length: f64) -> Result<Self> {
        if dims != 1 && dims != 2 {
            return Err(Error::InvalidGrid(format!("dims must be 1 or 2, got {dims}")));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n must be even and at least 4, got {n}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        Ok(SpatialGrid { dims, n, length })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Points per dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.n.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of complex coefficients in the half-spectrum layout.
    pub fn spectral_len(&self) -> usize {
        let half = self.n / 2 + 1;
        if self.dims == 1 {
            half
        } else {
            self.n * half
        }
    }

    /// Signed FFT index for position `i` in standard ordering. The Nyquist
    /// index `n/2` is reported as `+n/2`.
    pub fn signed_index(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Angular wavenumber `2π j / length` for FFT index position `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI * self.signed_index(i) as f64 / self.length
    }

    /// Same grid with `n / factor` points per dimension.
    pub fn coarsened(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.n.is_multiple_of(factor) {
            return Err(Error::param(format!(
                "coarsening factor {factor} does not divide n = {}",
                self.n
            )));
        }
        SpatialGrid::new(self.dims, self.n / factor, self.length)
    }
}

/// Real scalar field on a [`SpatialGrid`], row-major in 2D (`values[i * n + j]`
/// is the point `(x_i, y_j)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: SpatialGrid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: SpatialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::shape(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Field { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: SpatialGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Field::constant(grid, 0.0)
    }

    pub fn constant(grid: SpatialGrid, value: f64) -> Self {
        Field {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Evaluates `f` at the grid coordinates (`[x]` in 1D, `[x, y]` in 2D).
    pub fn from_fn(grid: SpatialGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let h = grid.spacing();
        let n = grid.n();
        let values = if grid.dims() == 1 {
            (0..n).map(|i| f(&[i as f64 * h])).collect()
        } else {
            (0..n * n)
                .map(|idx| f(&[(idx / n) as f64 * h, (idx % n) as f64 * h]))
                .collect()
        };
        Field { grid, values }
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Max-norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn ensure_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::shape(format!(
                "grids differ: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `self + scale * other`, elementwise.
    pub fn add_scaled(&self, other: &Field, scale: f64) -> Result<Field> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Field::from_vec_unchecked(self.grid, values))
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }
}

/// Half-spectrum coefficients of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: SpatialGrid,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: SpatialGrid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.spectral_len() {
            return Err(Error::shape(format!(
                "spectrum has {} coefficients, grid needs {}",
                data.len(),
                grid.spectral_len()
            )));
        }
        Ok(Spectrum { grid, data })
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
}

/// Wavenumber metadata of one coefficient in the half-spectrum layout.
#[derive(Debug, Clone, Copy)]
pub struct Mode {
    /// Angular wavenumber per axis (axis 1 unused in 1D).
    pub k: [f64; 2],
    /// Signed integer index per axis.
    pub index: [i64; 2],
    pub nyquist: [bool; 2],
}

impl Mode {
    pub fn k_squared(&self) -> f64 {
        self.k[0] * self.k[0] + self.k[1] * self.k[1]
    }
}

/// Multiplier of the `order`-th derivative along one axis.
pub fn derivative_factor(k: f64, nyquist: bool, order: u8) -> Complex64 {
    if nyquist && order % 2 == 1 {
        return ZERO;
    }
    match order {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, k),
        2 => Complex64::new(-k * k, 0.0),
        3 => Complex64::new(0.0, -k * k * k),
        _ => unreachable!("derivative orders are validated by callers"),
    }
}

/// Transform plans plus working buffers for one grid.
///
/// Plans are shared (`Arc`) so cloning is cheap apart from the buffers; each
/// worker should own its own instance.
#[derive(Clone)]
pub struct Spectral {
    grid: SpatialGrid,
    half: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    col_fwd: Option<Arc<dyn Fft<f64>>>,
    col_inv: Option<Arc<dyn Fft<f64>>>,
    modes: Vec<Mode>,
    row_real: Vec<f64>,
    row_cplx: Vec<Complex64>,
    /// Half-spectrum stored column-major for batched axis-0 transforms.
    columns: Vec<Complex64>,
    work: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Spectral {
    pub fn new(grid: SpatialGrid) -> Self {
        let n = grid.n();
        let half = n / 2 + 1;
        let mut real_planner = RealFftPlanner::<f64>::new();
        let r2c = real_planner.plan_fft_forward(n);
        let c2r = real_planner.plan_fft_inverse(n);
        let mut scratch_len = r2c.get_scratch_len().max(c2r.get_scratch_len());
        let (col_fwd, col_inv) = if grid.dims() == 2 {
            let mut planner = FftPlanner::<f64>::new();
            let f = planner.plan_fft_forward(n);
            let i = planner.plan_fft_inverse(n);
            scratch_len = scratch_len
                .max(f.get_inplace_scratch_len())
                .max(i.get_inplace_scratch_len());
            (Some(f), Some(i))
        } else {
            (None, None)
        };

        let modes = if grid.dims() == 1 {
            (0..half)
                .map(|j| Mode {
                    k: [grid.wavenumber(j), 0.0],
                    index: [j as i64, 0],
                    nyquist: [j == n / 2, false],
                })
                .collect()
        } else {
            (0..n * half)
                .map(|idx| {
                    let (i, j) = (idx / half, idx % half);
                    Mode {
                        k: [grid.wavenumber(i), grid.wavenumber(j)],
                        index: [grid.signed_index(i), j as i64],
                        nyquist: [i == n / 2, j == n / 2],
                    }
                })
                .collect()
        };

        Spectral {
            grid,
            half,
            r2c,
            c2r,
            col_fwd,
            col_inv,
            modes,
            row_real: vec![0.0; n],
            row_cplx: vec![ZERO; half],
            columns: vec![ZERO; grid.spectral_len()],
            work: vec![ZERO; grid.spectral_len()],
            scratch: vec![ZERO; scratch_len],
        }
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Unnormalized forward transform of `input` into `out`.
    pub fn forward_into(&mut self, input: &[f64], out: &mut [Complex64]) {
        let n = self.grid.n();
        let half = self.half;
        if self.grid.dims() == 1 {
            self.row_real.copy_from_slice(input);
            self.r2c
                .process_with_scratch(&mut self.row_real, out, &mut self.scratch)
                .expect("buffer sizes fixed at plan time");
            return;
        }
        for (row_in, row_out) in input.chunks_exact(n).zip(out.chunks_exact_mut(half)) {
            self.row_real.copy_from_slice(row_in);
            self.r2c
                .process_with_scratch(&mut self.row_real, row_out, &mut self.scratch)
                .expect("buffer sizes fixed at plan time");
        }
        transpose(out, &mut self.columns, n, half);
        let fft = self.col_fwd.as_ref().expect("2D plan");
        fft.process_with_scratch(&mut self.columns, &mut self.scratch);
        transpose(&self.columns, out, half, n);
    }

    /// Normalized inverse transform; `spectrum` is left untouched.
    pub fn inverse_into(&mut self, spectrum: &[Complex64], out: &mut [f64]) {
        let n = self.grid.n();
        let half = self.half;
        let norm = 1.0 / self.grid.len() as f64;
        if self.grid.dims() == 1 {
            self.row_cplx.copy_from_slice(spectrum);
            self.row_cplx[0].im = 0.0;
            self.row_cplx[half - 1].im = 0.0;
            self.c2r
                .process_with_scratch(&mut self.row_cplx, out, &mut self.scratch)
                .expect("buffer sizes fixed at plan time");
        } else {
            transpose(spectrum, &mut self.columns, n, half);
            let fft = self.col_inv.as_ref().expect("2D plan");
            fft.process_with_scratch(&mut self.columns, &mut self.scratch);
            transpose(&self.columns, &mut self.work, half, n);
            for (row_in, row_out) in self.work.chunks_exact(half).zip(out.chunks_exact_mut(n)) {
                self.row_cplx.copy_from_slice(row_in);
                self.row_cplx[0].im = 0.0;
                self.row_cplx[half - 1].im = 0.0;
                self.c2r
                    .process_with_scratch(&mut self.row_cplx, row_out, &mut self.scratch)
                    .expect("buffer sizes fixed at plan time");
            }
        }
        out.iter_mut().for_each(|v| *v *= norm);
    }

    pub fn forward(&mut self, field: &Field) -> Spectrum {
        let mut data = vec![ZERO; self.grid.spectral_len()];
        self.forward_into(field.values(), &mut data);
        Spectrum {
            grid: self.grid,
            data,
        }
    }

    pub fn inverse(&mut self, spectrum: &Spectrum) -> Field {
        let mut values = vec![0.0; self.grid.len()];
        self.inverse_into(&spectrum.data, &mut values);
        Field::from_vec_unchecked(self.grid, values)
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.grid.dims() {
            return Err(Error::AxisOutOfRange {
                axis,
                dims: self.grid.dims(),
            });
        }
        Ok(())
    }

    /// Multiplies coefficients by the symbol of `∂^order / ∂x_axis^order`.
    pub fn apply_derivative(&self, data: &mut [Complex64], order: u8, axis: usize) {
        for (c, m) in data.iter_mut().zip(&self.modes) {
            *c *= derivative_factor(m.k[axis], m.nyquist[axis], order);
        }
    }

    /// Zeroes every coefficient whose index exceeds two thirds of the
    /// Nyquist index on any axis.
    pub fn dealias_in_place(&self, data: &mut [Complex64]) {
        let n = self.grid.n() as i64;
        let dims = self.grid.dims();
        for (c, m) in data.iter_mut().zip(&self.modes) {
            if m.index[..dims].iter().any(|&s| 3 * s.abs() > n) {
                *c = ZERO;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct GridKey(usize, usize, u64);

thread_local! {
    static PLANS: RefCell<HashMap<GridKey, Spectral>> = RefCell::new(HashMap::new());
}

/// Transposes a `rows × cols` row-major block into `out` (`cols × rows`).
fn transpose(input: &[Complex64], out: &mut [Complex64], rows: usize, cols: usize) {
    for (r, row) in input.chunks_exact(cols).enumerate() {
        for (c, v) in row.iter().enumerate() {
            out[c * rows + r] = *v;
        }
    }
}

/// Runs `f` with a thread-local [`Spectral`] for `grid`. Reentrant: a nested
/// call for the same grid builds a fresh instance.
pub(crate) fn with_spectral<R>(grid: SpatialGrid, f: impl FnOnce(&mut Spectral) -> R) -> R {
    let key = GridKey(grid.dims(), grid.n(), grid.length().to_bits());
    let mut sp = PLANS
        .with(|p| p.borrow_mut().remove(&key))
        .unwrap_or_else(|| Spectral::new(grid));
    let out = f(&mut sp);
    PLANS.with(|p| p.borrow_mut().insert(key, sp));
    out
}

pub fn make_grid(dims: usize, n: usize, length: f64) -> Result<SpatialGrid> {
    SpatialGrid::new(dims, n, length)
}

pub fn forward(field: &Field) -> Spectrum {
    with_spectral(field.grid(), |sp| sp.forward(field))
}

pub fn inverse(spectrum: &Spectrum) -> Field {
    with_spectral(spectrum.grid(), |sp| sp.inverse(spectrum))
}

/// Exact spectral derivative of a periodic field.
pub fn spectral_derivative(field: &Field, order: u8, axis: usize) -> Result<Field> {
    if !(1..=3).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    with_spectral(field.grid(), |sp| {
        sp.check_axis(axis)?;
        let mut s = sp.forward(field);
        sp.apply_derivative(&mut s.data, order, axis);
        Ok(sp.inverse(&s))
    })
}

/// 2/3-rule truncation.
pub fn dealias(mut spectrum: Spectrum) -> Spectrum {
    with_spectral(spectrum.grid(), |sp| sp.dealias_in_place(&mut spectrum.data));
    spectrum
}

/// Streamfunction coefficients `ψ̂ = ŵ / |k|²` with the mean mode set to zero.
pub(crate) fn streamfunction_in_place(modes: &[Mode], data: &mut [Complex64]) {
    for (c, m) in data.iter_mut().zip(modes) {
        let k2 = m.k_squared();
        *c = if k2 == 0.0 { ZERO } else { *c / k2 };
    }
}

/// Velocity `(∂ψ/∂y, −∂ψ/∂x)` from vorticity via `∇²ψ = −w`.
pub fn velocity_from_vorticity(w: &Field) -> Result<(Field, Field)> {
    if w.grid().dims() != 2 {
        return Err(Error::InvalidGrid(
            "velocity_from_vorticity needs a 2D grid".into(),
        ));
    }
    with_spectral(w.grid(), |sp| {
        let mut psi = sp.forward(w);
        streamfunction_in_place(sp.modes(), &mut psi.data);
        let mut vx = psi.clone();
        sp.apply_derivative(&mut vx.data, 1, 1);
        let mut vy = psi;
        sp.apply_derivative(&mut vy.data, 1, 0);
        vy.data.iter_mut().for_each(|c| *c = -*c);
        Ok((sp.inverse(&vx), sp.inverse(&vy)))
    })
}
