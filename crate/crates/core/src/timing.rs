//! Wall-clock comparison of traditional and HOPSS generation.
//!
//! Absolute times depend on the machine; the quantities of interest are the
//! speedup ratio at matched sample counts and how per-sample cost scales with
//! the fine step count `T`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopss::{HopssConfig, HopssGenerator};
use crate::pipeline::{timed, TraditionConfig, TraditionGenerator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Tradition,
    Hopss,
    Mixup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub method: Method,
    pub sample_count: usize,
    /// Base pairs used (HOPSS and Mixup only).
    pub base_count: usize,
    pub fine_steps: usize,
    pub coarse_frames: usize,
    pub grid_n: usize,
    pub grid_n_coarse: usize,
    pub wall_seconds_total: f64,
    pub wall_seconds_base: f64,
    pub wall_seconds_generation: f64,
    pub per_sample_seconds: f64,
    /// Set when the total was scaled up from a run over fewer samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolated_from: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub fine_steps: usize,
    pub tradition_per_sample_seconds: f64,
    pub hopss_generation_per_sample_seconds: f64,
}

/// Per-sample cost against `T`, summarized by log–log slopes: 1 means cost
/// proportional to `T`, 0 means independent of it. Each slope is the median
/// over rounds of the slope fitted within one round; `*_iqr` is the
/// interquartile range of those per-round slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub points: Vec<ScalingPoint>,
    pub tradition_elasticity: f64,
    pub tradition_elasticity_iqr: f64,
    pub hopss_generation_elasticity: f64,
    pub hopss_generation_elasticity_iqr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub fine_steps: Vec<usize>,
    /// Traditional samples timed per point and round.
    pub tradition_samples: usize,
    pub base_count: usize,
    /// HOPSS samples timed per point and round.
    pub hopss_samples: usize,
    /// Rounds for the traditional solver.
    pub repetitions: usize,
    /// Rounds for HOPSS generation.
    #[serde(default = "default_hopss_rounds")]
    pub hopss_rounds: usize,
}

fn default_hopss_rounds() -> usize {
    16
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            fine_steps: vec![500, 1000, 2000, 4000],
            tradition_samples: 4,
            base_count: 10,
            hopss_samples: 50,
            repetitions: 5,
            hopss_rounds: default_hopss_rounds(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Base generation; `count` is `N_b`.
    pub base: TraditionConfig,
    /// HOPSS generation; `count` is `N_new`.
    pub hopss: HopssConfig,
    /// Traditional samples to compare against; defaults to `N_new`.
    #[serde(default)]
    pub tradition_count: Option<usize>,
    /// Traditional samples actually run; the total is scaled up to
    /// `tradition_count` when smaller.
    #[serde(default)]
    pub tradition_measured: Option<usize>,
    pub seed: u64,
    /// Samples run and discarded before each timed stage.
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    #[serde(default)]
    pub scaling: Option<ScalingConfig>,
}

fn default_warmup() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub tradition: TimingReport,
    pub hopss: TimingReport,
    /// Tradition total over HOPSS total at matched sample counts.
    pub speedup: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingStudy>,
    pub note: String,
}

const NOTE: &str = "wall-clock seconds are specific to this machine; compare ratios and scaling slopes";

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Times `count` traditional samples, running `measured` of them (all when
/// `None`) after `warmup` discarded ones.
pub fn time_tradition(
    config: &TraditionConfig,
    count: usize,
    measured: Option<usize>,
    seed: u64,
    warmup: usize,
) -> Result<TimingReport> {
    if count == 0 {
        return Err(Error::param("tradition sample count must be >= 1"));
    }
    let run = measured.unwrap_or(count).clamp(1, count);
    let generator = TraditionGenerator::new(*config, seed)?;
    if warmup > 0 {
        generator.generate_discard(count as u64..(count + warmup) as u64)?;
    }
    let (result, elapsed) = timed(|| generator.generate_discard(0..run as u64));
    result?;
    let per_sample = secs(elapsed) / run as f64;
    let total = per_sample * count as f64;
    Ok(TimingReport {
        method: Method::Tradition,
        sample_count: count,
        base_count: 0,
        fine_steps: config.steps,
        coarse_frames: config.frames(),
        grid_n: config.n,
        grid_n_coarse: config.coarse_grid()?.n(),
        wall_seconds_total: total,
        wall_seconds_base: 0.0,
        wall_seconds_generation: total,
        per_sample_seconds: per_sample,
        extrapolated_from: (run < count).then_some(run),
    })
}

/// Times the full HOPSS path: `base.count` traditional base pairs, then
/// `hopss.count` generated pairs.
pub fn time_hopss(base: &TraditionConfig, hopss: &HopssConfig, seed: u64, warmup: usize) -> Result<TimingReport> {
    let base_generator = TraditionGenerator::new(*base, seed)?;
    if warmup > 0 {
        let n = base.count as u64;
        base_generator.generate_discard(n..n + warmup as u64)?;
    }
    let (stages, total) = timed(|| -> Result<(Duration, Duration)> {
        let (pairs, base_time) = timed(|| base_generator.generate(0..base.count as u64));
        let pairs = pairs?;
        let (result, gen_time) = timed(|| -> Result<()> {
            HopssGenerator::new(&pairs, *hopss, seed.wrapping_add(1))?.generate_discard(0..hopss.count as u64)
        });
        result?;
        Ok((base_time, gen_time))
    });
    let (base_time, generation) = stages?;
    Ok(TimingReport {
        method: Method::Hopss,
        sample_count: hopss.count,
        base_count: base.count,
        fine_steps: base.steps,
        coarse_frames: base.frames(),
        grid_n: base.n,
        grid_n_coarse: base.coarse_grid()?.n(),
        wall_seconds_total: secs(total),
        wall_seconds_base: secs(base_time),
        wall_seconds_generation: secs(generation),
        per_sample_seconds: secs(total) / hopss.count as f64,
        extrapolated_from: None,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn median(values: &mut [f64]) -> f64 {
    quantile(values, 0.5)
}

fn quantile(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let pos = q * (values.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    values[lo] + (values[hi] - values[lo]) * (pos - lo as f64)
}

fn iqr(values: &mut [f64]) -> f64 {
    quantile(values, 0.75) - quantile(values, 0.25)
}

/// Times every stage once per round, in alternating order so that linear
/// drift in machine speed cancels within a round. Returns per-round,
/// per-stage seconds per sample.
fn rounds<S>(
    stages: &[S],
    count: usize,
    samples: u64,
    mut run: impl FnMut(&S) -> Result<()>,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(count);
    for round in 0..count {
        let mut times = vec![0.0; stages.len()];
        let order: Vec<usize> = if round % 2 == 0 {
            (0..stages.len()).collect()
        } else {
            (0..stages.len()).rev().collect()
        };
        for k in order {
            let (r, t) = timed(|| run(&stages[k]));
            r?;
            times[k] = secs(t) / samples as f64;
        }
        out.push(times);
    }
    Ok(out)
}

fn summarize(ts: &[f64], rounds: &[Vec<f64>]) -> (Vec<f64>, f64, f64) {
    let mut slopes: Vec<f64> = rounds.iter().map(|r| log_log_slope(ts, r)).collect();
    let per_point = (0..ts.len())
        .map(|k| median(&mut rounds.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect();
    (per_point, median(&mut slopes), iqr(&mut slopes))
}

/// Per-sample costs at each fine step count. The coarse trajectory keeps the
/// frame count of `base`, so the recording stride grows with `T` while the
/// fine `dt` stays fixed.
pub fn scaling_study(
    base: &TraditionConfig,
    hopss: &HopssConfig,
    scaling: &ScalingConfig,
    seed: u64,
) -> Result<ScalingStudy> {
    if scaling.fine_steps.len() < 2 {
        return Err(Error::param("a scaling study needs at least two fine step counts"));
    }
    let intervals = base.frames() - 1;
    let m = scaling.tradition_samples.max(1) as u64;
    let h = scaling.hopss_samples.max(1) as u64;
    let cfg = HopssConfig { count: h as usize, ..*hopss };
    let mut stages = Vec::with_capacity(scaling.fine_steps.len());
    for &steps in &scaling.fine_steps {
        if steps % intervals != 0 {
            return Err(Error::param(format!(
                "fine step count {steps} is not a multiple of {intervals} coarse intervals"
            )));
        }
        let config = TraditionConfig {
            steps,
            stride: steps / intervals,
            count: scaling.base_count,
            ..*base
        };
        let generator = TraditionGenerator::new(config, seed)?;
        generator.generate_discard(m..m + 1)?;
        let pairs = generator.generate(0..scaling.base_count as u64)?;
        HopssGenerator::new(&pairs, cfg, seed)?.generate_discard(h..h + 8)?;
        stages.push((generator, pairs));
    }

    let ts: Vec<f64> = scaling.fine_steps.iter().map(|&t| t as f64).collect();
    let tradition = rounds(&stages, scaling.repetitions.max(1), m, |(g, _)| g.generate_discard(0..m).map(drop))?;
    let generation = rounds(&stages, scaling.hopss_rounds.max(1), h, |(_, pairs)| {
        HopssGenerator::new(pairs, cfg, seed)?.generate_discard(0..h)
    })?;
    let (trad_points, tradition_elasticity, tradition_elasticity_iqr) = summarize(&ts, &tradition);
    let (gen_points, hopss_generation_elasticity, hopss_generation_elasticity_iqr) = summarize(&ts, &generation);
    let points = scaling
        .fine_steps
        .iter()
        .zip(trad_points.iter().zip(&gen_points))
        .map(|(&fine_steps, (&t, &g))| ScalingPoint {
            fine_steps,
            tradition_per_sample_seconds: t,
            hopss_generation_per_sample_seconds: g,
        })
        .collect();
    Ok(ScalingStudy {
        points,
        tradition_elasticity,
        tradition_elasticity_iqr,
        hopss_generation_elasticity,
        hopss_generation_elasticity_iqr,
    })
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    let hopss = time_hopss(&config.base, &config.hopss, config.seed, config.warmup)?;
    let count = config.tradition_count.unwrap_or(config.hopss.count);
    let tradition = time_tradition(&config.base, count, config.tradition_measured, config.seed, config.warmup)?;
    let scaling = match &config.scaling {
        Some(s) => Some(scaling_study(&config.base, &config.hopss, s, config.seed)?),
        None => None,
    };
    Ok(BenchReport {
        speedup: tradition.wall_seconds_total / hopss.wall_seconds_total,
        tradition,
        hopss,
        scaling,
        note: NOTE.to_string(),
    })
}
