//! Homologous perturbation: new solution pairs from perturbed base pairs
//! with recomputed forcing, plus the Mixup baseline.

pub mod generate;
pub mod mixup;
pub mod noise;
pub mod perturb;
pub mod residual;

pub use generate::{generate_hopss_dataset, HopssConfig, HopssGenerator, PairPolicy};
pub use mixup::{generate_mixup_dataset, mixup_pair, mixup_range, mixup_sample, mixup_weights, mixup_with_weights};
pub use noise::{noise_amplitude, synthesize_noise, NoiseKind, NoiseScale, NoiseSpec};
pub use perturb::{homologous_perturb, rhs_variation, rhs_variation_with};
pub use residual::{discrete_residual, discrete_residual_with, ResidualOperator};
