mod common;

use hopss_core::hopss::{mixup_range, HopssGenerator, NoiseSpec};
use hopss_core::pipeline::TraditionGenerator;
use hopss_core::timing::{time_hopss, time_tradition, BenchConfig};
use hopss_core::{
    run_benchmark, verify_dataset, Error, Forcing, GrfParams, HopssConfig, NonlinearForm, PdeSpec, Provenance,
    SolutionPair, TraditionConfig,
};

fn small_burgers(count: usize) -> TraditionConfig {
    TraditionConfig {
        n: 256,
        steps: 200,
        stride: 10,
        coarsen: 4,
        count,
        ..TraditionConfig::burgers()
    }
}

fn small_ns(count: usize) -> TraditionConfig {
    TraditionConfig {
        n: 32,
        steps: 400,
        stride: 20,
        count,
        ..TraditionConfig::navier_stokes_desk()
    }
}

fn base(config: TraditionConfig, seed: u64) -> Vec<SolutionPair> {
    TraditionGenerator::new(config, seed).unwrap().generate(0..config.count as u64).unwrap()
}

fn ok(pairs: &[SolutionPair]) -> impl Iterator<Item = hopss_core::Result<SolutionPair>> + '_ {
    pairs.iter().cloned().map(Ok)
}

#[test]
fn hopss_pairs_pass_verification_for_every_pde() {
    for config in [small_burgers(4), small_ns(4), TraditionConfig { count: 4, steps: 2000, stride: 100, ..TraditionConfig::kdv() }] {
        let base = base(config, 1);
        let base_report = verify_dataset(ok(&base), None, 1e-12, NonlinearForm::Convective).unwrap();
        assert!(base_report.all_passed(), "{}: base residual {:e}", config.pde.name(), base_report.max_relative_residual);

        let hopss = HopssConfig { count: 40, ..HopssConfig::default() };
        let pairs = HopssGenerator::new(&base, hopss, 2).unwrap().generate(0..40).unwrap();
        let report = verify_dataset(ok(&pairs), Some(&base), 1e-8, NonlinearForm::Convective).unwrap();
        assert!(report.all_passed());
        let worst = report.max_base_consistency.unwrap();
        let scale = base.iter().map(|p| p.f.max_abs()).fold(1.0, f64::max);
        assert!(worst <= 1e-12 * scale, "{}: {worst:e}", config.pde.name());
        // without the base, the relative residual is just as small
        let alone = verify_dataset(ok(&pairs), None, 1e-8, NonlinearForm::Convective).unwrap();
        assert!(alone.all_passed());
    }
}

#[test]
fn unperturbed_sample_duplicates_its_base_pair() {
    let base = base(small_burgers(3), 5);
    let config = HopssConfig {
        mu: 0.0,
        noise: NoiseSpec::zero(),
        count: 1,
        ..HopssConfig::default()
    };
    let pair = HopssGenerator::new(&base, config, 6).unwrap().pair(0).unwrap();
    let Provenance::Hopss { i, .. } = pair.provenance else {
        panic!("expected a HOPSS tag");
    };
    assert_eq!(pair.u, base[i].u);
    assert_eq!(pair.f, Forcing::PerInterval(base[i].forcing_per_interval().unwrap()));
}

#[test]
fn provenance_is_predicted_before_generation() {
    let base = base(small_burgers(5), 5);
    let g = HopssGenerator::new(&base, HopssConfig::default(), 8).unwrap();
    for k in 0..20 {
        assert_eq!(g.provenance(k), g.pair(k).unwrap().provenance);
    }
}

#[test]
fn generation_is_independent_of_chunking_and_threads() {
    let base = base(small_burgers(4), 5);
    let g = HopssGenerator::new(&base, HopssConfig::default(), 8).unwrap();
    let whole = g.generate(0..30).unwrap();
    let mut pieces = g.generate(0..7).unwrap();
    pieces.extend(g.generate(7..30).unwrap());
    assert_eq!(whole, pieces);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    assert_eq!(pool.install(|| g.generate(0..30).unwrap()), whole);
}

#[test]
fn hopss_needs_two_base_pairs() {
    let base = base(small_burgers(1), 5);
    assert!(matches!(
        HopssGenerator::new(&base, HopssConfig::default(), 1),
        Err(Error::InsufficientBase { required: 2, got: 1 })
    ));
}

#[test]
fn mixup_ns_pairs_violate_the_equation() {
    let base = base(small_ns(10), 3);
    let mixed = mixup_range(&base, 4, 0..100).unwrap();
    let report = verify_dataset(ok(&mixed), None, 1e-8, NonlinearForm::Convective).unwrap();
    let inconsistent = report.samples.iter().filter(|s| s.relative_residual > 1e-2).count();
    assert!(inconsistent >= 95, "{inconsistent} of 100");
}

#[test]
fn single_base_mixup_is_a_copy() {
    let base = base(small_burgers(1), 3);
    let mixed = mixup_range(&base, 4, 0..3).unwrap();
    for m in mixed {
        assert_eq!(m.u, base[0].u);
        assert_eq!(m.f, base[0].f);
    }
}

#[test]
fn blow_up_is_reported_as_numerical() {
    let config = TraditionConfig {
        initial: hopss_core::pipeline::InitialCondition::Grf(GrfParams::new(7.0, 2.5, 1e4)),
        pde: PdeSpec::Burgers { reynolds: 1e9 },
        ..small_burgers(1)
    };
    let err = TraditionGenerator::new(config, 1).unwrap().pair(0).unwrap_err();
    assert!(err.is_numerical(), "{err}");
}

#[test]
fn generation_stage_skips_fine_stepping() {
    // N_new = N_b and μ = 0: the generation stage only evaluates residuals
    let config = small_burgers(8);
    let hopss = HopssConfig {
        mu: 0.0,
        count: 8,
        ..HopssConfig::default()
    };
    let report = time_hopss(&config, &hopss, 1, 1).unwrap();
    assert!(report.wall_seconds_generation * 5.0 < report.wall_seconds_base, "{report:?}");
    assert!(report.wall_seconds_total >= report.wall_seconds_base + report.wall_seconds_generation - 1e-3);
}

#[test]
fn tradition_extrapolation_is_proportional() {
    let config = small_burgers(1);
    let report = time_tradition(&config, 40, Some(4), 1, 1).unwrap();
    assert_eq!(report.extrapolated_from, Some(4));
    assert!((report.wall_seconds_total - 40.0 * report.per_sample_seconds).abs() <= 1e-9);
}

#[test]
fn speedup_grows_with_generated_count() {
    let speedup = |count| {
        let config = BenchConfig {
            base: TraditionConfig { steps: 2000, stride: 100, ..small_burgers(4) },
            hopss: HopssConfig { count, ..HopssConfig::default() },
            tradition_count: None,
            tradition_measured: Some(8),
            seed: 1,
            warmup: 1,
            scaling: None,
        };
        run_benchmark(&config).unwrap().speedup
    };
    let (small, large) = (speedup(8), speedup(200));
    assert!(large > 2.0 * small, "{small} -> {large}");
}

#[test]
fn full_size_1d_presets_stay_bounded() {
    for (config, count) in [(TraditionConfig::burgers(), 32), (TraditionConfig::kdv(), 2)] {
        for seed in 1..=3 {
            let pairs = base(TraditionConfig { count, ..config }, seed);
            assert_eq!(pairs.len(), count);
            assert!(pairs.iter().all(|p| p.u.max_abs().is_finite() && p.u.max_abs() > 0.0), "{}", config.pde.name());
        }
    }
}
