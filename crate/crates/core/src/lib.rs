//! Training-data synthesis for nonlinear time-dependent PDEs.
//!
//! The crate contains a pseudo-spectral semi-implicit Crank–Nicolson solver
//! for 2D Navier–Stokes (vorticity form), 1D Burgers and 1D forced KdV, the
//! resampling that maps fine solver output to training resolution, and the
//! homologous-perturbation generator that mass-produces new `(u, f)` pairs from
//! a small set of base solutions by perturbing them and recomputing the forcing
//! through the discrete residual operator.

pub mod error;
pub mod grf;
pub mod hopss;
pub mod pair;
pub mod pipeline;
pub mod resample;
pub mod rng;
pub mod solver;
pub mod spectral;
pub mod store;
pub mod timing;
pub mod verify;

pub use error::{Error, Result};
pub use grf::{sample_grf, GrfParams};
pub use hopss::{HopssConfig, NoiseKind, NoiseSpec};
pub use pair::{Forcing, ForcingLayout, Provenance, SolutionPair};
pub use solver::{cn_step, solve_trajectory, NonlinearForm, PdeSpec, SolverOptions, Trajectory};
pub use pipeline::{Generation, TraditionConfig};
pub use spectral::{Field, SpatialGrid};
pub use store::{read_dataset, write_dataset, DatasetManifest};
pub use timing::{run_benchmark, BenchConfig, BenchReport, TimingReport};
pub use verify::{verify_dataset, VerifyReport};
