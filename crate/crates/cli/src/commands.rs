use std::fmt;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use hopss_core::hopss::{HopssConfig, HopssGenerator, NoiseKind, NoiseScale, NoiseSpec};
use hopss_core::pair::{ForcingLayout, Provenance, SolutionPair};
use hopss_core::pipeline::{BaseForcing, Generation, InitialCondition, TraditionConfig, TraditionGenerator};
use hopss_core::resample::SpatialDownsample;
use hopss_core::rng::derive_seed;
use hopss_core::store::{export_csv, read_dataset, DatasetManifest, DatasetReader, DatasetShape, DatasetWriter};
use hopss_core::timing::{run_benchmark, BenchConfig, ScalingConfig};
use hopss_core::{verify_dataset, Error, GrfParams, NonlinearForm, PdeSpec};
use serde::Serialize;

use crate::args::*;

/// A failed command, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Stage { stage: &'static str, error: Error },
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Stage { error, .. } if error.is_numerical() => 2,
            Failure::Stage { .. } => 1,
            Failure::Verification(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Stage { stage, error } => write!(f, "{stage}: {error}"),
            Failure::Verification(m) => write!(f, "verify: {m}"),
        }
    }
}

type CmdResult<T = ()> = Result<T, Failure>;

trait Stage<T> {
    fn stage(self, stage: &'static str) -> CmdResult<T>;
}

impl<T, E: Into<Error>> Stage<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> CmdResult<T> {
        self.map_err(|e| Failure::Stage {
            stage,
            error: e.into(),
        })
    }
}

fn usage<T>(msg: impl Into<String>) -> CmdResult<T> {
    Err(Failure::Usage(msg.into()))
}

pub struct Globals {
    pub seed: Option<u64>,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Globals {
    fn out(&self) -> CmdResult<&Path> {
        match &self.out {
            Some(p) => Ok(p),
            None => usage("--out is required"),
        }
    }

    fn generation(&self) -> CmdResult<Option<Generation>> {
        let Some(path) = &self.config else {
            return Ok(None);
        };
        let text = fs::read_to_string(path).stage("reading config")?;
        serde_json::from_str(&text).map(Some).stage("parsing config")
    }
}

pub fn canonical_json<T: Serialize>(value: &T) -> CmdResult<String> {
    let v = serde_json::to_value(value).stage("serializing")?;
    serde_json::to_string(&v).stage("serializing")
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Generates `manifest.sample_count` pairs in parallel chunks and streams them
/// to `path` in index order.
fn write_chunked(
    path: &Path,
    manifest: DatasetManifest,
    stage: &'static str,
    generate: impl Fn(Range<u64>) -> hopss_core::Result<Vec<SolutionPair>>,
) -> CmdResult {
    let count = manifest.sample_count as u64;
    let chunk = 32 * rayon::current_num_threads() as u64;
    let mut writer = DatasetWriter::create(path, manifest).stage("writing dataset")?;
    let mut fill = || {
        let mut start = 0;
        while start < count {
            let end = (start + chunk).min(count);
            for pair in generate(start..end).stage(stage)? {
                writer.write_pair(&pair).stage("writing dataset")?;
            }
            start = end;
        }
        Ok(())
    };
    let result = fill().and_then(|()| writer.finish().stage("writing dataset"));
    if result.is_err() {
        // a partial file would only fail later with a truncation error
        let _ = std::fs::remove_file(path);
    }
    result
}

fn tradition_config(args: &TraditionArgs, from_file: Option<TraditionConfig>) -> CmdResult<TraditionConfig> {
    let mut c = match (from_file, args.pde) {
        (Some(c), Some(kind)) if c.pde.name() != kind.key() => {
            return usage(format!(
                "--pde {} conflicts with the {} configuration file",
                kind.key(),
                c.pde.name()
            ))
        }
        (Some(c), _) => c,
        (None, Some(kind)) => TraditionConfig::preset(kind.key()).expect("every PDE kind has a preset"),
        (None, None) => return usage("--pde or --config is required"),
    };
    apply_tradition_overrides(&mut c, args)?;
    Ok(c)
}

fn apply_tradition_overrides(c: &mut TraditionConfig, args: &TraditionArgs) -> CmdResult {
    match &mut c.pde {
        PdeSpec::Ns2d { nu } => {
            if let Some(v) = args.nu {
                *nu = v;
            }
        }
        PdeSpec::Burgers { reynolds } => {
            if let Some(v) = args.reynolds {
                *reynolds = v;
            }
        }
        PdeSpec::Kdv {
            lambda_adv,
            alpha_nl,
            beta_disp,
        } => {
            if let Some(v) = args.lambda_adv {
                *lambda_adv = v;
            }
            if let Some(v) = args.alpha_nl {
                *alpha_nl = v;
            }
            if let Some(v) = args.beta_disp {
                *beta_disp = v;
            }
        }
    }
    let wrong = match c.pde {
        PdeSpec::Ns2d { .. } => args.reynolds.is_some() || kdv_flags(args),
        PdeSpec::Burgers { .. } => args.nu.is_some() || kdv_flags(args),
        PdeSpec::Kdv { .. } => args.nu.is_some() || args.reynolds.is_some(),
    };
    if wrong {
        return usage(format!("coefficient flag does not apply to {}", c.pde.name()));
    }
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = args.$field {
                c.$field = v;
            }
        )*};
    }
    set!(n, length, dt, steps, stride, coarsen, blowup_cap);
    if let Some(s) = args.spatial {
        c.spatial_downsample = match s {
            SpatialArg::Subsample => SpatialDownsample::Subsample,
            SpatialArg::SpectralTruncation => SpatialDownsample::SpectralTruncation,
        };
    }
    if let Some(b) = args.base_forcing {
        c.base_forcing = match b {
            BaseForcingArg::Residual => BaseForcing::Residual,
            BaseForcingArg::Downsampled => BaseForcing::Downsampled,
        };
    }
    if let Some(nl) = args.nonlinear {
        c.nonlinear = nonlinear(nl);
    }
    if args.zero_ic {
        c.initial = InitialCondition::Zero;
    } else if args.ic_tau.is_some() || args.ic_alpha.is_some() || args.ic_sigma.is_some() {
        let mut p = match c.initial {
            InitialCondition::Grf(p) => p,
            InitialCondition::Zero => c.forcing,
        };
        override_grf(&mut p, args.ic_tau, args.ic_alpha, args.ic_sigma);
        c.initial = InitialCondition::Grf(p);
    }
    override_grf(&mut c.forcing, args.f_tau, args.f_alpha, args.f_sigma);
    c.validate().stage("configuration")
}

fn kdv_flags(args: &TraditionArgs) -> bool {
    args.lambda_adv.is_some() || args.alpha_nl.is_some() || args.beta_disp.is_some()
}

fn override_grf(p: &mut GrfParams, tau: Option<f64>, alpha: Option<f64>, sigma: Option<f64>) {
    if let Some(v) = tau {
        p.tau = v;
    }
    if let Some(v) = alpha {
        p.alpha = v;
    }
    if let Some(v) = sigma {
        p.sigma = v;
    }
}

fn nonlinear(arg: NonlinearArg) -> NonlinearForm {
    match arg {
        NonlinearArg::Convective => NonlinearForm::Convective,
        NonlinearArg::Conservative => NonlinearForm::Conservative,
    }
}

fn apply_noise(spec: &mut NoiseSpec, args: &NoiseArgs) -> CmdResult {
    if let Some(kind) = args.noise {
        let kind = match kind {
            NoiseArg::Gaussian => NoiseKind::Gaussian,
            NoiseArg::MultiSine => NoiseKind::MultiSine,
            NoiseArg::Perlin => NoiseKind::Perlin,
            NoiseArg::RandomWalk => NoiseKind::RandomWalk,
            NoiseArg::Zero => NoiseKind::Zero,
        };
        if kind != spec.kind {
            // a different kind starts from the relative-amplitude defaults
            *spec = NoiseSpec::relative(kind, 1e-3);
        }
    }
    if let Some(s) = args.sigma {
        if spec.kind != NoiseKind::Gaussian {
            return usage("--sigma applies to gaussian noise only; use --epsilon");
        }
        spec.epsilon = s;
        spec.scale = NoiseScale::Absolute;
    }
    if let Some(e) = args.epsilon {
        spec.epsilon = e;
        spec.scale = NoiseScale::Relative;
    }
    if let Some(k) = args.k_modes {
        spec.k_modes = k;
    }
    if let Some(c) = args.cells {
        spec.cells = c;
    }
    spec.validate().stage("configuration")
}

pub fn gen_base(g: &Globals, args: &GenBaseArgs) -> CmdResult {
    let (file_config, file_seed) = match g.generation()? {
        None => (None, None),
        Some(Generation::Tradition { config, seed }) => (Some(config), Some(seed)),
        Some(other) => return usage(format!("gen-base needs a tradition config, got {}", other.method())),
    };
    let mut config = tradition_config(&args.tradition, file_config)?;
    if let Some(count) = args.count {
        config.count = count;
    }
    config.validate().stage("configuration")?;
    let seed = g.seed.or(file_seed).unwrap_or(0);
    let out = g.out()?;

    let generator = TraditionGenerator::new(config, seed).stage("gen-base")?;
    let shape = DatasetShape {
        pde: config.pde,
        grid: config.coarse_grid().stage("configuration")?,
        dt: config.dt_coarse(),
        t0: 0.0,
        frames: config.frames(),
        forcing_layout: config.forcing_layout(),
    };
    let mut manifest = DatasetManifest::new(
        shape,
        vec![Provenance::Base; config.count],
        Some(Generation::Tradition { config, seed }),
    );
    if args.stamp {
        manifest.created_utc = Some(timestamp());
    }
    write_chunked(out, manifest, "gen-base", |r| generator.generate(r))?;
    eprintln!(
        "gen-base: wrote {} pairs ({} frames on {}^{} grid) to {}",
        config.count,
        config.frames(),
        shape.grid.n(),
        shape.grid.dims(),
        out.display()
    );
    Ok(())
}

fn load_base(path: &Path) -> CmdResult<(Vec<SolutionPair>, DatasetManifest)> {
    read_dataset(path).stage("reading base dataset")
}

pub fn hopss(g: &Globals, args: &HopssArgs) -> CmdResult {
    let (mut config, file_seed) = match g.generation()? {
        None => (HopssConfig::default(), None),
        Some(Generation::Hopss { config, seed, .. }) => (config, Some(seed)),
        Some(other) => return usage(format!("hopss needs a hopss config, got {}", other.method())),
    };
    if let Some(count) = args.count {
        config.count = count;
    }
    if let Some(mu) = args.mu {
        config.mu = mu;
    }
    apply_noise(&mut config.noise, &args.noise)?;
    config.validate().stage("configuration")?;
    let seed = g.seed.or(file_seed).unwrap_or(0);
    let out = g.out()?;

    let (base, base_manifest) = load_base(&args.base)?;
    let generator = HopssGenerator::new(&base, config, seed).stage("hopss")?;
    let shape = DatasetShape {
        forcing_layout: ForcingLayout::PerInterval,
        ..base_manifest.shape()
    };
    let provenance = (0..config.count as u64).map(|k| generator.provenance(k)).collect();
    let generation = Generation::Hopss {
        base: base_manifest.generation.map(Box::new),
        config,
        seed,
    };
    let mut manifest = DatasetManifest::new(shape, provenance, Some(generation));
    if args.stamp {
        manifest.created_utc = Some(timestamp());
    }
    write_chunked(out, manifest, "hopss", |r| generator.generate(r))?;
    eprintln!("hopss: wrote {} pairs from {} base pairs to {}", config.count, base.len(), out.display());
    Ok(())
}

pub fn mixup(g: &Globals, args: &MixupArgs) -> CmdResult {
    let (file_count, file_seed) = match g.generation()? {
        None => (None, None),
        Some(Generation::Mixup { count, seed, .. }) => (Some(count), Some(seed)),
        Some(other) => return usage(format!("mixup needs a mixup config, got {}", other.method())),
    };
    let Some(count) = args.count.or(file_count) else {
        return usage("--count is required");
    };
    if count == 0 {
        return usage("--count must be >= 1");
    }
    let seed = g.seed.or(file_seed).unwrap_or(0);
    let out = g.out()?;
    let (base, base_manifest) = load_base(&args.base)?;
    if base.is_empty() {
        return Err(Failure::Stage {
            stage: "mixup",
            error: Error::InsufficientBase { required: 1, got: 0 },
        });
    }
    let shape = base_manifest.shape();
    let provenance = (0..count as u64)
        .map(|k| Provenance::Mixup {
            seed: derive_seed(seed, k),
        })
        .collect();
    let generation = Generation::Mixup {
        base: base_manifest.generation.map(Box::new),
        count,
        seed,
    };
    let mut manifest = DatasetManifest::new(shape, provenance, Some(generation));
    if args.stamp {
        manifest.created_utc = Some(timestamp());
    }
    write_chunked(out, manifest, "mixup", |r| hopss_core::hopss::mixup_range(&base, seed, r))?;
    eprintln!("mixup: wrote {count} pairs from {} base pairs to {}", base.len(), out.display());
    Ok(())
}

pub fn verify(g: &Globals, args: &VerifyArgs) -> CmdResult {
    let reader = DatasetReader::open(&args.dataset).stage("reading dataset")?;
    let base = match &args.base {
        Some(p) => Some(load_base(p)?.0),
        None => None,
    };
    let report = verify_dataset(reader, base.as_deref(), args.tol, nonlinear(args.nonlinear)).stage("verify")?;
    if let Some(out) = &g.out {
        fs::write(out, canonical_json(&report)?).stage("writing report")?;
    }
    let consistency = report
        .max_base_consistency
        .map(|c| format!("; max base consistency {c:.3e}"))
        .unwrap_or_default();
    println!(
        "verified {} pairs at tol {:e}: {} passed, {} failed; max relative residual {:.3e}{consistency}",
        report.samples.len(),
        report.tolerance,
        report.passed,
        report.failed,
        report.max_relative_residual,
    );
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} of {} pairs failed", report.failed, report.samples.len())))
    }
}

pub fn bench(g: &Globals, args: &BenchArgs) -> CmdResult {
    let (file_base, file_hopss, file_seed) = match g.generation()? {
        None => (None, None, None),
        Some(Generation::Hopss {
            base: Some(base),
            config,
            seed,
        }) => match *base {
            Generation::Tradition { config: b, .. } => (Some(b), Some(config), Some(seed)),
            other => return usage(format!("bench needs a tradition base record, got {}", other.method())),
        },
        Some(_) => return usage("bench needs a hopss config with a tradition base record"),
    };
    let file_base = match (file_base, args.desk) {
        (Some(_), true) => return usage("--desk conflicts with --config"),
        (None, true) => Some(TraditionConfig::navier_stokes_desk()),
        (b, false) => b,
    };
    let tradition_args = TraditionArgs {
        pde: args.tradition.pde.or(if file_base.is_none() { Some(PdeKind::Ns2d) } else { None }),
        ..args.tradition.clone()
    };
    let mut base = tradition_config(&tradition_args, file_base)?;
    if let Some(n) = args.base_count {
        base.count = n;
    }
    let mut hopss = file_hopss.unwrap_or_default();
    if let Some(n) = args.count {
        hopss.count = n;
    }
    if let Some(mu) = args.mu {
        hopss.mu = mu;
    }
    apply_noise(&mut hopss.noise, &args.noise)?;
    hopss.validate().stage("configuration")?;
    let config = BenchConfig {
        base,
        hopss,
        tradition_count: args.tradition_count,
        tradition_measured: args.tradition_measured,
        seed: g.seed.or(file_seed).unwrap_or(0),
        warmup: args.warmup.unwrap_or(2),
        scaling: args.scaling_steps.clone().map(|fine_steps| ScalingConfig {
            fine_steps,
            ..ScalingConfig::default()
        }),
    };
    let report = run_benchmark(&config).stage("bench")?;
    let json = canonical_json(&report)?;
    match &g.out {
        Some(out) => fs::write(out, &json).stage("writing report")?,
        None => println!("{json}"),
    }
    eprintln!(
        "bench: tradition {:.2}s for {} pairs, hopss {:.2}s ({:.2}s base + {:.2}s generation), speedup {:.2}x",
        report.tradition.wall_seconds_total,
        report.tradition.sample_count,
        report.hopss.wall_seconds_total,
        report.hopss.wall_seconds_base,
        report.hopss.wall_seconds_generation,
        report.speedup
    );
    Ok(())
}

pub fn export(g: &Globals, args: &ExportArgs) -> CmdResult {
    let out = g.out()?;
    let ExportFormat::Csv = args.format;
    let n = export_csv(&args.dataset, out).stage("export")?;
    eprintln!("export: wrote {n} CSV files to {}", out.display());
    Ok(())
}
