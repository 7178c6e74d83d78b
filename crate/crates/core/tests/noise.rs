mod common;

use common::*;
use hopss_core::hopss::{noise_amplitude, synthesize_noise, NoiseKind, NoiseSpec};
use hopss_core::Field;

const STRUCTURED: [NoiseKind; 3] = [NoiseKind::MultiSine, NoiseKind::Perlin, NoiseKind::RandomWalk];

#[test]
fn structured_kinds_peak_at_the_amplitude() {
    let g = grid(1, 64);
    let reference = Field::from_fn(g, |x| (6.0 * x[0]).sin());
    let a = noise_amplitude(1e-3, &reference).unwrap();
    assert_eq!(a, 1e-3 * reference.max_abs());
    for kind in STRUCTURED {
        for seed in 0..50 {
            let eta = synthesize_noise(&NoiseSpec::relative(kind, 1e-3), &reference, &mut rng(seed)).unwrap();
            assert!((eta.max_abs() - a).abs() <= 1e-12, "{kind:?}");
        }
    }
}

#[test]
fn multi_sine_with_unit_reference_peaks_at_epsilon() {
    let g = grid(1, 64);
    let reference = Field::constant(g, 1.0);
    let spec = NoiseSpec { k_modes: 8, ..NoiseSpec::relative(NoiseKind::MultiSine, 1e-3) };
    let eta = synthesize_noise(&spec, &reference, &mut rng(1)).unwrap();
    assert!((eta.max_abs() - 1e-3).abs() <= 1e-12);
}

#[test]
fn random_walk_is_centred() {
    let g = grid(1, 256);
    let reference = Field::constant(g, 3.0);
    for seed in 0..50 {
        let eta = synthesize_noise(&NoiseSpec::relative(NoiseKind::RandomWalk, 1e-2), &reference, &mut rng(seed)).unwrap();
        let mean = eta.values().iter().sum::<f64>() / 256.0;
        assert!(mean.abs() <= 1e-15, "mean {mean:e}");
    }
}

#[test]
fn gaussian_std_matches_amplitude() {
    let g = grid(2, 128);
    let reference = Field::constant(g, 2.0);
    for spec in [NoiseSpec::gaussian_std(1e-4), NoiseSpec::relative(NoiseKind::Gaussian, 5e-5)] {
        let eta = synthesize_noise(&spec, &reference, &mut rng(21)).unwrap();
        let n = eta.values().len() as f64;
        assert!(n >= 1e4);
        let mean = eta.values().iter().sum::<f64>() / n;
        let std = (eta.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((std / 1e-4 - 1.0).abs() < 0.05, "std {std:e}");
    }
}

#[test]
fn zero_reference_falls_back_to_tiny_amplitude() {
    let g = grid(1, 64);
    let zero = Field::zeros(g);
    assert_eq!(noise_amplitude(1e-3, &zero).unwrap(), 1e-8);
    for kind in STRUCTURED {
        let eta = synthesize_noise(&NoiseSpec::relative(kind, 1e-3), &zero, &mut rng(2)).unwrap();
        assert!((eta.max_abs() - 1e-8).abs() <= 1e-20);
    }
}

#[test]
fn zero_kind_is_zero() {
    let g = grid(2, 16);
    let eta = synthesize_noise(&NoiseSpec::zero(), &Field::constant(g, 5.0), &mut rng(0)).unwrap();
    assert_eq!(eta, Field::zeros(g));
}
