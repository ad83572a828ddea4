//! End-to-end training and evaluation.
//!
//! Training synthesizes a reference series for every training case at the
//! ground-truth marker positions (so the pair is perfectly aligned), embeds
//! both sides, pools covariances, and fits the latent map. Testing
//! synthesizes from the unaligned blueprint, projects both series into the
//! latent space, aligns them with DTW, and maps the blueprint markers back
//! onto the input series. The plain-DTW baseline skips the latent space and
//! aligns the raw series directly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cca::{accumulate_covariances, fit_cca, project, CovarianceSet, LatentMap};
use crate::datagen::{canonical_template, gen_benchmark, BenchmarkConfig, GeneratedCase};
use crate::dtw::{dtw_align, DtwConfig};
use crate::embedding::{embed, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::model::{AlignedModel, Alignment, Model, SampleMarker, TimeSeries};
use crate::synthesis::{
    reference_length, synthesize_binary_samples, synthesize_replication_samples, Template,
};

/// Default number of cross-validation folds.
pub const DEFAULT_FOLDS: usize = 5;

/// The default embedding grid for cross-validation: symmetric windows of
/// 0, 5, 10, 20 and 40 samples per side.
pub fn default_embedding_candidates() -> Vec<EmbeddingConfig> {
    [0, 5, 10, 20, 40]
        .into_iter()
        .map(EmbeddingConfig::symmetric)
        .collect()
}

/// How the reference series is synthesized from a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisKind {
    Binary,
    Replication,
}

/// Synthesis strategy plus the template replication needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSpec {
    pub kind: SynthesisKind,
    pub template: Option<Template>,
}

impl SynthesisSpec {
    pub fn binary() -> Self {
        Self {
            kind: SynthesisKind::Binary,
            template: None,
        }
    }

    pub fn replication(template: Template) -> Self {
        Self {
            kind: SynthesisKind::Replication,
            template: Some(template),
        }
    }

    /// A template must be present exactly when replication is selected.
    pub fn validate(&self) -> Result<()> {
        match (self.kind, &self.template) {
            (SynthesisKind::Replication, None) => Err(Error::MissingTemplate),
            (SynthesisKind::Binary, Some(_)) => Err(Error::InvalidInput(
                "binary synthesis takes no template".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn synthesize(&self, markers: &[SampleMarker], length: usize) -> Result<TimeSeries> {
        self.validate()?;
        match self.kind {
            SynthesisKind::Binary => synthesize_binary_samples(markers, length),
            SynthesisKind::Replication => synthesize_replication_samples(
                markers,
                self.template.as_ref().expect("validated"),
                length,
            ),
        }
    }
}

/// Ridge selection: a fixed value, or scaled from the data (1e-6 times the
/// mean pooled autocovariance diagonal).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RidgeSpec {
    #[default]
    Auto,
    Fixed(f64),
}

impl RidgeSpec {
    fn resolve(&self, covs: &CovarianceSet) -> f64 {
        match self {
            RidgeSpec::Auto => covs.auto_ridge(),
            RidgeSpec::Fixed(r) => *r,
        }
    }
}

/// Everything training needs besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub embedding: EmbeddingConfig,
    pub ridge: RidgeSpec,
    pub synthesis: SynthesisSpec,
    /// Z-normalize each series before embedding and alignment.
    pub znorm: bool,
}

impl TrainConfig {
    pub fn new(embedding: EmbeddingConfig, synthesis: SynthesisSpec) -> Self {
        Self {
            embedding,
            ridge: RidgeSpec::Auto,
            synthesis,
            znorm: false,
        }
    }
}

/// A fitted latent map together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub latent: LatentMap,
    pub train_config: TrainConfig,
}

fn preprocess(series: &TimeSeries, znorm: bool) -> TimeSeries {
    if znorm {
        series.zscored()
    } else {
        series.clone()
    }
}

/// Pools the training covariances for the given configuration. The ridge in
/// the returned set is already resolved.
pub fn training_covariances(
    cases: &[GeneratedCase],
    config: &TrainConfig,
) -> Result<CovarianceSet> {
    if cases.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    config.synthesis.validate()?;
    let pairs: Vec<_> = cases
        .iter()
        .map(|case| {
            case.truth.check_within(case.series.len())?;
            let reference = config
                .synthesis
                .synthesize(&case.truth.markers, case.series.len())?;
            let x = preprocess(&case.series, config.znorm);
            let y = preprocess(&reference, config.znorm);
            Ok((embed(&x, config.embedding), embed(&y, config.embedding)))
        })
        .collect::<Result<_>>()?;
    let covs = accumulate_covariances(&pairs, 0.0)?;
    let ridge = config.ridge.resolve(&covs);
    covs.with_ridge(ridge)
}

/// Learns the latent map from cases whose ground-truth alignment is known.
pub fn train(cases: &[GeneratedCase], config: &TrainConfig) -> Result<TrainedModel> {
    let covs = training_covariances(cases, config)?;
    let latent = fit_cca(&covs)?;
    Ok(TrainedModel {
        latent,
        train_config: config.clone(),
    })
}

fn blueprint_reference(
    blueprint: &Model,
    synthesis: &SynthesisSpec,
) -> Result<(Vec<SampleMarker>, TimeSeries)> {
    blueprint.validate()?;
    let markers = blueprint.marker_samples()?;
    let length = reference_length(blueprint.max_end_samples());
    let reference = synthesis.synthesize(&markers, length)?;
    Ok((markers, reference))
}

/// Like [`align_test`] but also returns the latent-space warping path.
pub fn align_test_full(
    series: &TimeSeries,
    blueprint: &Model,
    trained: &TrainedModel,
) -> Result<(AlignedModel, Alignment)> {
    trained.latent.validate()?;
    let config = &trained.train_config;
    if trained.latent.embedding != config.embedding {
        return Err(Error::MixedEmbeddingConfigs);
    }
    let (markers, reference) = blueprint_reference(blueprint, &config.synthesis)?;
    let x = preprocess(series, config.znorm);
    let y = preprocess(&reference, config.znorm);
    let x_latent = project(&embed(&x, config.embedding), &trained.latent.w_x)?;
    let y_latent = project(&embed(&y, config.embedding), &trained.latent.w_y)?;
    let alignment = dtw_align(&x_latent, &y_latent, &DtwConfig::default())?;
    let aligned = alignment.map_markers(&markers)?;
    Ok((aligned, alignment))
}

/// Aligns a series to its blueprint through the learned latent space and
/// returns the blueprint markers mapped onto the series.
pub fn align_test(
    series: &TimeSeries,
    blueprint: &Model,
    trained: &TrainedModel,
) -> Result<AlignedModel> {
    align_test_full(series, blueprint, trained).map(|(aligned, _)| aligned)
}

/// Like [`align_baseline`] but also returns the raw warping path.
pub fn align_baseline_full(
    series: &TimeSeries,
    blueprint: &Model,
    synthesis: &SynthesisSpec,
    znorm: bool,
) -> Result<(AlignedModel, Alignment)> {
    let (markers, reference) = blueprint_reference(blueprint, synthesis)?;
    let x = preprocess(series, znorm);
    let y = preprocess(&reference, znorm);
    let alignment = dtw_align(&x, &y, &DtwConfig::default())?;
    let aligned = alignment.map_markers(&markers)?;
    Ok((aligned, alignment))
}

/// Plain-DTW baseline: aligns the raw series to the raw synthesized
/// reference, no embedding or projection.
pub fn align_baseline(
    series: &TimeSeries,
    blueprint: &Model,
    synthesis: &SynthesisSpec,
    znorm: bool,
) -> Result<AlignedModel> {
    align_baseline_full(series, blueprint, synthesis, znorm).map(|(aligned, _)| aligned)
}

/// Mean absolute difference, in samples, over all marker starts and ends
/// pooled.
pub fn localization_error(estimated: &AlignedModel, truth: &AlignedModel) -> Result<f64> {
    if estimated.markers.len() != truth.markers.len() {
        return Err(Error::MarkerCountMismatch {
            estimated: estimated.markers.len(),
            truth: truth.markers.len(),
        });
    }
    if estimated.markers.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = estimated
        .markers
        .iter()
        .zip(&truth.markers)
        .map(|(e, t)| ((e.start - t.start).abs() + (e.end - t.end).abs()) as f64)
        .sum();
    Ok(total / (2 * estimated.markers.len()) as f64)
}

/// Which alignment route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DtwBaseline,
    CcaDtw,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::DtwBaseline => "dtw_baseline",
            Method::CcaDtw => "cca_dtw",
        }
    }
}

/// Per-series localization errors of one method over one test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: Method,
    pub per_series_errors: Vec<f64>,
    pub mean_error: f64,
}

impl EvalReport {
    pub fn new(method: Method, per_series_errors: Vec<f64>) -> Result<Self> {
        if per_series_errors.is_empty() {
            return Err(Error::InvalidInput("no per-series errors".into()));
        }
        let mean_error = per_series_errors.iter().sum::<f64>() / per_series_errors.len() as f64;
        Ok(Self {
            method,
            per_series_errors,
            mean_error,
        })
    }
}

/// Runs both methods over a test set. Returns `(baseline, cca)` reports.
pub fn evaluate_methods(
    test_cases: &[GeneratedCase],
    trained: &TrainedModel,
) -> Result<(EvalReport, EvalReport)> {
    if test_cases.is_empty() {
        return Err(Error::InvalidInput("no test cases".into()));
    }
    let pairs: Vec<(f64, f64)> = test_cases
        .par_iter()
        .map(|case| {
            let baseline = align_baseline(
                &case.series,
                &case.blueprint,
                &trained.train_config.synthesis,
                trained.train_config.znorm,
            )?;
            let err_baseline = localization_error(&baseline, &case.truth)?;
            let estimated = align_test(&case.series, &case.blueprint, trained)?;
            let err_cca = localization_error(&estimated, &case.truth)?;
            Ok((err_baseline, err_cca))
        })
        .collect::<Result<_>>()?;
    let baseline = EvalReport::new(Method::DtwBaseline, pairs.iter().map(|p| p.0).collect())?;
    let cca = EvalReport::new(Method::CcaDtw, pairs.iter().map(|p| p.1).collect())?;
    Ok((baseline, cca))
}

/// Picks the embedding with the lowest cross-validated localization error.
///
/// Series are split round-robin by index into `folds` parts; each candidate
/// trains on `folds - 1` parts and scores on the held-out part. Ties go to
/// the smaller dimension, then the smaller past window.
pub fn cross_validate_embedding(
    cases: &[GeneratedCase],
    candidates: &[EmbeddingConfig],
    folds: usize,
    ridge: RidgeSpec,
    synthesis: &SynthesisSpec,
    znorm: bool,
) -> Result<EmbeddingConfig> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if folds < 2 {
        return Err(Error::TooFewFolds(folds));
    }
    if folds > cases.len() {
        return Err(Error::TooManyFolds {
            folds,
            size: cases.len(),
        });
    }

    let mut best: Option<(f64, EmbeddingConfig)> = None;
    for &candidate in candidates {
        let config = TrainConfig {
            embedding: candidate,
            ridge,
            synthesis: synthesis.clone(),
            znorm,
        };
        let mut errors = Vec::new();
        for fold in 0..folds {
            let train_set: Vec<GeneratedCase> = cases
                .iter()
                .enumerate()
                .filter(|(i, _)| i % folds != fold)
                .map(|(_, c)| c.clone())
                .collect();
            let held_out: Vec<&GeneratedCase> = cases
                .iter()
                .enumerate()
                .filter(|(i, _)| i % folds == fold)
                .map(|(_, c)| c)
                .collect();
            let trained = train(&train_set, &config)?;
            let fold_errors: Vec<f64> = held_out
                .par_iter()
                .map(|case| {
                    let estimated = align_test(&case.series, &case.blueprint, &trained)?;
                    localization_error(&estimated, &case.truth)
                })
                .collect::<Result<_>>()?;
            errors.extend(fold_errors);
        }
        let score = errors.iter().sum::<f64>() / errors.len() as f64;
        let better = match &best {
            None => true,
            Some((best_score, best_cfg)) => {
                score < *best_score
                    || (score == *best_score
                        && (candidate.dim(), candidate.past) < (best_cfg.dim(), best_cfg.past))
            }
        };
        if better {
            best = Some((score, candidate));
        }
    }
    Ok(best.expect("candidates nonempty").1)
}

/// One per-series result of a noise sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub noise_rate: f64,
    pub method: Method,
    pub series_id: usize,
    pub error_samples: f64,
}

/// Mean error of one method at one noise rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryRow {
    pub noise_rate: f64,
    pub method: Method,
    pub mean_error: f64,
    pub n_series: usize,
}

/// Full sweep output: per-series rows plus derived summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Mean per (rate, method), in row order of first appearance.
    pub fn summary(&self) -> Vec<SweepSummaryRow> {
        let mut keys: Vec<(f64, Method)> = Vec::new();
        for row in &self.rows {
            if !keys
                .iter()
                .any(|(r, m)| *r == row.noise_rate && *m == row.method)
            {
                keys.push((row.noise_rate, row.method));
            }
        }
        keys.into_iter()
            .map(|(rate, method)| {
                let errors: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.noise_rate == rate && r.method == method)
                    .map(|r| r.error_samples)
                    .collect();
                SweepSummaryRow {
                    noise_rate: rate,
                    method,
                    mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
                    n_series: errors.len(),
                }
            })
            .collect()
    }

    /// Mean error of one method at one rate, if present.
    pub fn mean_of(&self, rate: f64, method: Method) -> Option<f64> {
        self.summary()
            .into_iter()
            .find(|s| s.noise_rate == rate && s.method == method)
            .map(|s| s.mean_error)
    }
}

/// Regenerates the benchmark at each noise rate, cross-validates the
/// embedding, trains on the designated training cases, and scores both
/// methods on the designated test cases.
pub fn noise_sweep(
    config: &BenchmarkConfig,
    rates: &[f64],
    candidates: &[EmbeddingConfig],
    folds: usize,
    ridge: RidgeSpec,
    synthesis_kind: SynthesisKind,
    znorm: bool,
) -> Result<SweepReport> {
    config.validate()?;
    if rates.is_empty() {
        return Err(Error::InvalidInput("no noise rates".into()));
    }
    for &rate in rates {
        if !(0.0..=1.0).contains(&rate) || !rate.is_finite() {
            return Err(Error::InvalidInput(format!("noise rate {rate} outside [0, 1]")));
        }
    }
    let train_ids = config.train_indices();
    let test_ids = config.test_indices();
    if train_ids.is_empty() || test_ids.is_empty() {
        return Err(Error::InvalidInput(format!(
            "need both training and test cases, got {} / {}",
            train_ids.len(),
            test_ids.len()
        )));
    }

    let synthesis = match synthesis_kind {
        SynthesisKind::Binary => SynthesisSpec::binary(),
        SynthesisKind::Replication => SynthesisSpec::replication(canonical_template(config)),
    };

    let mut rows = Vec::new();
    for &rate in rates {
        let cfg_rate = BenchmarkConfig {
            noise_rate: rate,
            ..config.clone()
        };
        let cases = gen_benchmark(&cfg_rate)?;
        let train_cases = &cases[..train_ids.len()];
        let test_cases = &cases[train_ids.len()..];

        let embedding =
            cross_validate_embedding(train_cases, candidates, folds, ridge, &synthesis, znorm)?;
        let trained = train(
            train_cases,
            &TrainConfig {
                embedding,
                ridge,
                synthesis: synthesis.clone(),
                znorm,
            },
        )?;
        let (baseline, cca) = evaluate_methods(test_cases, &trained)?;
        for (method, report) in [
            (Method::DtwBaseline, &baseline),
            (Method::CcaDtw, &cca),
        ] {
            for (k, &err) in report.per_series_errors.iter().enumerate() {
                rows.push(SweepRow {
                    noise_rate: rate,
                    method,
                    series_id: train_ids.len() + k,
                    error_samples: err,
                });
            }
        }
    }
    Ok(SweepReport { rows })
}
