//! Seeded synthetic benchmark: raised-cosine patterns placed by a random
//! blueprint, deformed by a smooth monotone time warp, and buried under a
//! sinusoidal background ("sine noise").
//!
//! Every case is a pure function of `(seed, case_index)` through the frozen
//! SplitMix64 streams in [`crate::rng`], so benchmarks are bit-reproducible.
//! The per-case draw order is likewise frozen: for each marker a spacing
//! then a width; then one amplitude factor per marker; then the noise phase.
//! All draws are consumed even when their effect is disabled (for example
//! `noise_rate = 0`), so sweeping one corruption parameter never reshuffles
//! the others.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{round_half_up, AlignedModel, Marker, Model, SampleMarker, TimeSeries};
use crate::rng::SplitMix64;
use crate::synthesis::{reference_length, resample_linear, Template};

/// Number of leading benchmark cases designated for training.
pub const DEFAULT_TRAIN_COUNT: usize = 19;

/// Full description of a generated benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub n_series: usize,
    pub n_markers_per_series: usize,
    /// Inclusive (min, max) pattern width in samples.
    pub pattern_width_samples: (usize, usize),
    /// Inclusive (min, max) gap before each pattern in samples.
    pub spacing_samples: (usize, usize),
    /// Sinusoid amplitude as a fraction of the clean signal's peak, in [0, 1].
    pub noise_rate: f64,
    pub noise_period_samples: f64,
    /// Strength of the sinusoidal time warp, in [0, 0.5).
    pub warp_strength: f64,
    /// Per-marker amplitude jitter, in [0, 1).
    pub pattern_jitter: f64,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    /// The shipped benchmark: densely packed patterns (short gaps keep
    /// plain DTW well-conditioned at low noise, so the method comparison
    /// isolates the effect of the background noise) and a noise period of
    /// about three pattern widths so the sinusoid spectrally overlaps the
    /// patterns.
    fn default() -> Self {
        Self {
            n_series: 198,
            n_markers_per_series: 8,
            pattern_width_samples: (21, 29),
            spacing_samples: (3, 9),
            noise_rate: 0.5,
            noise_period_samples: 75.0,
            warp_strength: 0.05,
            pattern_jitter: 0.2,
            seed: 1001,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_series == 0 {
            return fail("n_series must be positive".into());
        }
        if self.n_markers_per_series == 0 {
            return fail("n_markers_per_series must be positive".into());
        }
        let (wmin, wmax) = self.pattern_width_samples;
        if wmin < 3 || wmin > wmax {
            return fail(format!(
                "pattern_width_samples ({wmin}, {wmax}) must satisfy 3 <= min <= max"
            ));
        }
        let (smin, smax) = self.spacing_samples;
        if smin < 1 || smin > smax {
            return fail(format!(
                "spacing_samples ({smin}, {smax}) must satisfy 1 <= min <= max"
            ));
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return fail(format!("noise_rate {} outside [0, 1]", self.noise_rate));
        }
        if !(self.noise_period_samples > 0.0) || !self.noise_period_samples.is_finite() {
            return fail(format!(
                "noise_period_samples {} must be positive",
                self.noise_period_samples
            ));
        }
        if !(0.0..0.5).contains(&self.warp_strength) {
            return fail(format!("warp_strength {} outside [0, 0.5)", self.warp_strength));
        }
        if !(0.0..1.0).contains(&self.pattern_jitter) {
            return fail(format!("pattern_jitter {} outside [0, 1)", self.pattern_jitter));
        }
        Ok(())
    }

    /// Width of the canonical pattern: the midpoint of the width range.
    pub fn canonical_width(&self) -> usize {
        let (wmin, wmax) = self.pattern_width_samples;
        (wmin + wmax).div_ceil(2)
    }

    /// Indices of the cases designated for training.
    pub fn train_indices(&self) -> Vec<usize> {
        (0..DEFAULT_TRAIN_COUNT.min(self.n_series)).collect()
    }

    /// Indices of the cases designated for testing.
    pub fn test_indices(&self) -> Vec<usize> {
        (DEFAULT_TRAIN_COUNT.min(self.n_series)..self.n_series).collect()
    }
}

/// One benchmark case: the corrupted series, where the patterns really are
/// (`truth`), and the unwarped blueprint handed to the aligner.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCase {
    pub series: TimeSeries,
    pub truth: AlignedModel,
    pub blueprint: Model,
}

fn raised_cosine(width: usize) -> Vec<f64> {
    debug_assert!(width >= 3);
    let last = (width - 1) as f64;
    (0..width)
        .map(|k| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / last).cos())
        .collect()
}

/// A raised-cosine bump of the given width with its peak amplitude scaled
/// by `1 + jitter * u`, `u` drawn uniformly from [-1, 1].
pub fn gen_template(width: usize, jitter: f64, rng: &mut SplitMix64) -> Result<Template> {
    if width < 3 {
        return Err(Error::InvalidConfig(format!(
            "pattern width {width} is below the minimum of 3"
        )));
    }
    let amp = 1.0 + jitter * rng.next_signed_unit();
    Template::new(raised_cosine(width).iter().map(|v| v * amp).collect(), 0)
}

/// The jitter-free pattern every case replicates: a unit raised cosine at
/// the canonical width. Alignment harnesses use this same template for
/// replication synthesis.
pub fn canonical_template(config: &BenchmarkConfig) -> Template {
    Template::new(raised_cosine(config.canonical_width()), 0).expect("canonical width >= 3")
}

/// The forward warp map t' = t + strength * L * sin(2 pi t / L) / (2 pi).
/// Strictly increasing for strength < 1; maps [0, L] onto [0, L].
fn warp_forward(t: f64, strength: f64, len: f64) -> f64 {
    let b = 2.0 * std::f64::consts::PI / len;
    t + strength / b * (b * t).sin()
}

/// Inverts the forward warp by Newton iteration (the derivative is bounded
/// below by 1 - strength > 0.5).
fn warp_inverse(s: f64, strength: f64, len: f64) -> f64 {
    let b = 2.0 * std::f64::consts::PI / len;
    let mut t = s;
    for _ in 0..64 {
        let f = t + strength / b * (b * t).sin() - s;
        if f.abs() < 1e-12 {
            break;
        }
        t -= f / (1.0 + strength * (b * t).cos());
    }
    t
}

fn lerp_clamped(values: &[f64], pos: f64) -> f64 {
    let last = (values.len() - 1) as f64;
    let pos = pos.clamp(0.0, last);
    let i0 = pos.floor() as usize;
    if i0 >= values.len() - 1 {
        values[values.len() - 1]
    } else {
        let frac = pos - i0 as f64;
        values[i0] * (1.0 - frac) + values[i0 + 1] * frac
    }
}

#[cfg_attr(not(test), allow(dead_code))]
struct CaseParts {
    clean: Vec<f64>,
    warped: Vec<f64>,
    series: Vec<f64>,
    markers: Vec<SampleMarker>,
    truth: Vec<SampleMarker>,
    noise_amp: f64,
}

fn gen_case_parts(config: &BenchmarkConfig, case_index: usize) -> Result<CaseParts> {
    let mut rng = SplitMix64::for_case(config.seed, case_index as u64);
    let n = config.n_markers_per_series;
    let (smin, smax) = config.spacing_samples;
    let (wmin, wmax) = config.pattern_width_samples;

    let mut markers = Vec::with_capacity(n);
    let mut cursor = 0i64;
    for _ in 0..n {
        let gap = rng.next_range(smin as u64, smax as u64) as i64;
        let width = rng.next_range(wmin as u64, wmax as u64) as i64;
        let start = cursor + gap;
        let end = start + width - 1;
        cursor = end + 1;
        markers.push(SampleMarker::new(start, end, 0));
    }
    let amps: Vec<f64> = (0..n)
        .map(|_| 1.0 + config.pattern_jitter * rng.next_signed_unit())
        .collect();
    let phase = 2.0 * std::f64::consts::PI * rng.next_unit();

    let last_end = markers.last().expect("n >= 1").end;
    let length = reference_length(last_end as f64);

    let canon = canonical_template(config);
    let mut clean = vec![0.0; length];
    for (m, amp) in markers.iter().zip(&amps) {
        let pattern = resample_linear(&canon.values, m.width());
        for (k, v) in pattern.iter().enumerate() {
            clean[m.start as usize + k] = v * amp;
        }
    }
    let peak = clean.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

    let len_f = length as f64;
    let warped: Vec<f64> = if config.warp_strength == 0.0 {
        clean.clone()
    } else {
        (0..length)
            .map(|s| {
                let t = warp_inverse(s as f64, config.warp_strength, len_f);
                lerp_clamped(&clean, t)
            })
            .collect()
    };

    let noise_amp = config.noise_rate * peak;
    let omega = 2.0 * std::f64::consts::PI / config.noise_period_samples;
    let series: Vec<f64> = warped
        .iter()
        .enumerate()
        .map(|(k, v)| v + noise_amp * (omega * k as f64 + phase).sin())
        .collect();

    let truth: Vec<SampleMarker> = markers
        .iter()
        .map(|m| {
            let map = |t: i64| -> i64 {
                round_half_up(warp_forward(t as f64, config.warp_strength, len_f))
                    .clamp(0, length as i64 - 1)
            };
            SampleMarker::new(map(m.start), map(m.end), m.class_id)
        })
        .collect();

    Ok(CaseParts {
        clean,
        warped,
        series,
        markers,
        truth,
        noise_amp,
    })
}

/// Generates one case; deterministic in `(config.seed, case_index)`.
pub fn gen_case(config: &BenchmarkConfig, case_index: usize) -> Result<GeneratedCase> {
    config.validate()?;
    let parts = gen_case_parts(config, case_index)?;
    let blueprint = Model::new(
        parts
            .markers
            .iter()
            .map(|m| Marker::new(m.start as f64, m.end as f64, m.class_id))
            .collect(),
        1.0,
    )?;
    Ok(GeneratedCase {
        series: TimeSeries::new(parts.series)?,
        truth: AlignedModel::new(parts.truth)?,
        blueprint,
    })
}

/// Generates the whole benchmark. Cases are independent, so generation is
/// parallel; order matches case index.
pub fn gen_benchmark(config: &BenchmarkConfig) -> Result<Vec<GeneratedCase>> {
    config.validate()?;
    (0..config.n_series)
        .into_par_iter()
        .map(|i| gen_case(config, i))
        .collect()
}
