//! File formats and (de)serialization entry points.
//!
//! Everything that crosses a process boundary goes through the `parse_*`
//! functions here, which validate domain invariants after structural
//! parsing; the fuzz targets drive them directly. Formats:
//!
//! * model: JSON `{"samples_per_unit": number, "markers": [{"start", "end",
//!   "class"}, ...]}`
//! * series: CSV with one value per line and no header, or a JSON array of
//!   numbers
//! * template: JSON `{"values": [...], "class": n}`, a bare JSON array
//!   (class 0), or series CSV (class 0)
//! * latent map: JSON `{"past", "future", "ridge", "rho", "w_x", "w_y"}`
//! * aligned model: JSON `{"markers": [{"start", "end", "class"}, ...]}`
//!   with integer sample positions
//! * alignment: JSON `{"cost": number, "path": [[i, j], ...]}`
//! * benchmark config and manifest: JSON mirrors of the structs

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cca::LatentMap;
use crate::datagen::BenchmarkConfig;
use crate::error::{Error, Result};
use crate::model::{AlignedModel, Alignment, Model, TimeSeries};
use crate::pipeline::{SweepReport, SweepSummaryRow};
use crate::synthesis::Template;

pub fn parse_model_json(text: &str) -> Result<Model> {
    let model: Model = serde_json::from_str(text)?;
    model.validate()?;
    Ok(model)
}

pub fn parse_series_csv(text: &str) -> Result<TimeSeries> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: f64 = trimmed
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        values.push(value);
    }
    TimeSeries::new(values)
}

pub fn parse_series_json(text: &str) -> Result<TimeSeries> {
    let values: Vec<f64> = serde_json::from_str(text)?;
    TimeSeries::new(values)
}

/// Accepts both series formats: JSON if the first non-space byte is `[`,
/// CSV otherwise.
pub fn parse_series_str(text: &str) -> Result<TimeSeries> {
    if text.trim_start().starts_with('[') {
        parse_series_json(text)
    } else {
        parse_series_csv(text)
    }
}

pub fn parse_template_str(text: &str) -> Result<Template> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let template: Template = serde_json::from_str(text)?;
        Template::new(template.values, template.class_id)
    } else {
        let series = parse_series_str(text)?;
        Template::new(series.values().to_vec(), 0)
    }
}

pub fn parse_latent_map_json(text: &str) -> Result<LatentMap> {
    let map: LatentMap = serde_json::from_str(text)?;
    map.validate()?;
    Ok(map)
}

pub fn parse_aligned_model_json(text: &str) -> Result<AlignedModel> {
    let parsed: AlignedModel = serde_json::from_str(text)?;
    AlignedModel::new(parsed.markers)
}

#[derive(Serialize, Deserialize)]
struct AlignmentFile {
    cost: f64,
    path: Vec<(usize, usize)>,
}

pub fn parse_alignment_json(text: &str) -> Result<Alignment> {
    let parsed: AlignmentFile = serde_json::from_str(text)?;
    Alignment::new(parsed.path, parsed.cost)
}

pub fn alignment_to_json(alignment: &Alignment) -> String {
    let file = AlignmentFile {
        cost: alignment.total_cost(),
        path: alignment.path().to_vec(),
    };
    serde_json::to_string(&file).expect("alignment serializes")
}

pub fn parse_benchmark_config_json(text: &str) -> Result<BenchmarkConfig> {
    let config: BenchmarkConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}

pub fn series_to_csv(series: &TimeSeries) -> String {
    let mut out = String::new();
    for v in series.values() {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

/// Per-series sweep rows as CSV with a fixed header.
pub fn sweep_to_csv(report: &SweepReport) -> String {
    let mut out = String::from("noise_rate,method,series_id,error_samples\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.noise_rate,
            row.method.as_str(),
            row.series_id,
            row.error_samples
        ));
    }
    out
}

/// Mean errors per (rate, method) as a JSON array.
pub fn sweep_summary_json(summary: &[SweepSummaryRow]) -> String {
    to_json_pretty(&summary)
}

/// Written next to every command's outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
}

/// SHA-256 of the canonical serialization, so hand-edited files hash the
/// same regardless of key order or whitespace.
pub fn config_hash(config: &BenchmarkConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn load_model(path: &Path) -> Result<Model> {
    parse_model_json(&read_to_string(path)?)
}

pub fn load_series(path: &Path) -> Result<TimeSeries> {
    parse_series_str(&read_to_string(path)?)
}

pub fn load_template(path: &Path) -> Result<Template> {
    parse_template_str(&read_to_string(path)?)
}

pub fn load_latent_map(path: &Path) -> Result<LatentMap> {
    parse_latent_map_json(&read_to_string(path)?)
}

pub fn load_aligned_model(path: &Path) -> Result<AlignedModel> {
    parse_aligned_model_json(&read_to_string(path)?)
}

pub fn load_benchmark_config(path: &Path) -> Result<BenchmarkConfig> {
    parse_benchmark_config_json(&read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbeddingConfig;
    use crate::model::{Marker, SampleMarker};

    #[test]
    fn model_json_roundtrip() {
        let text = r#"{"samples_per_unit": 10.0,
                       "markers": [{"start": 1.0, "end": 2.0, "class": 0},
                                   {"start": 3.0, "end": 4.5, "class": 1}]}"#;
        let model = parse_model_json(text).unwrap();
        assert_eq!(model.markers.len(), 2);
        let again = parse_model_json(&to_json_pretty(&model)).unwrap();
        assert_eq!(model, again);
    }

    #[test]
    fn model_json_rejects_invalid() {
        assert!(parse_model_json("{}").is_err());
        assert!(parse_model_json(
            r#"{"samples_per_unit": 0, "markers": [{"start": 0, "end": 1, "class": 0}]}"#
        )
        .is_err());
        assert!(parse_model_json(
            r#"{"samples_per_unit": 1, "markers": [{"start": 1, "end": 0, "class": 0}]}"#
        )
        .is_err());
    }

    #[test]
    fn series_csv_and_json_agree() {
        let csv = "1.5\n-2\n0.25\n";
        let json = "[1.5, -2, 0.25]";
        let a = parse_series_str(csv).unwrap();
        let b = parse_series_str(json).unwrap();
        assert_eq!(a, b);
        let again = parse_series_str(&series_to_csv(&a)).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn series_rejects_garbage() {
        assert!(parse_series_csv("1.0\nnot a number\n").is_err());
        assert!(parse_series_csv("").is_err());
        assert!(parse_series_csv("inf\n").is_err());
        assert!(parse_series_json("[1.0, null]").is_err());
    }

    #[test]
    fn template_forms() {
        let obj = r#"{"values": [0.0, 1.0, 0.0], "class": 2}"#;
        let t = parse_template_str(obj).unwrap();
        assert_eq!(t.class_id, 2);
        assert_eq!(t.values, vec![0.0, 1.0, 0.0]);

        let arr = parse_template_str("[0.0, 1.0]").unwrap();
        assert_eq!(arr.class_id, 0);

        let csv = parse_template_str("0.5\n0.75\n").unwrap();
        assert_eq!(csv.values, vec![0.5, 0.75]);

        assert!(parse_template_str("{\"values\": [], \"class\": 0}").is_err());
    }

    #[test]
    fn latent_map_json_shape() {
        let map = LatentMap {
            embedding: EmbeddingConfig::new(1, 2),
            ridge: 1e-6,
            rho: 0.5,
            w_x: vec![0.1, 0.2, 0.3, 0.4],
            w_y: vec![0.4, 0.3, 0.2, 0.1],
        };
        let text = to_json_pretty(&map);
        for key in ["past", "future", "ridge", "rho", "w_x", "w_y"] {
            assert!(text.contains(&format!("\"{key}\"")), "missing {key} in {text}");
        }
        let back = parse_latent_map_json(&text).unwrap();
        assert_eq!(map, back);

        // Mismatched dimension must fail validation.
        let bad = r#"{"past": 1, "future": 1, "ridge": 0, "rho": 0.2,
                      "w_x": [1, 2], "w_y": [1, 2, 3]}"#;
        assert!(parse_latent_map_json(bad).is_err());
    }

    #[test]
    fn aligned_model_json_validates() {
        let ok = r#"{"markers": [{"start": 3, "end": 8, "class": 0}]}"#;
        let parsed = parse_aligned_model_json(ok).unwrap();
        assert_eq!(parsed.markers, vec![SampleMarker::new(3, 8, 0)]);

        let reversed = r#"{"markers": [{"start": 8, "end": 3, "class": 0}]}"#;
        assert!(parse_aligned_model_json(reversed).is_err());
        let negative = r#"{"markers": [{"start": -1, "end": 3, "class": 0}]}"#;
        assert!(parse_aligned_model_json(negative).is_err());
    }

    #[test]
    fn alignment_json_roundtrip_and_validation() {
        let al = Alignment::new(vec![(0, 0), (1, 0), (1, 1)], 2.5).unwrap();
        let text = alignment_to_json(&al);
        let back = parse_alignment_json(&text).unwrap();
        assert_eq!(back.path(), al.path());
        assert_eq!(back.total_cost(), al.total_cost());

        assert!(parse_alignment_json(r#"{"cost": 0, "path": [[1, 1]]}"#).is_err());
        assert!(parse_alignment_json(r#"{"cost": -1, "path": [[0, 0]]}"#).is_err());
        assert!(parse_alignment_json(r#"{"cost": 0, "path": [[0, 0], [2, 2]]}"#).is_err());
    }

    #[test]
    fn benchmark_config_roundtrip_and_hash_stability() {
        let config = BenchmarkConfig::default();
        let text = to_json_pretty(&config);
        let back = parse_benchmark_config_json(&text).unwrap();
        assert_eq!(config, back);

        // Key order does not change the hash.
        let reordered = r#"{
            "seed": 1001,
            "n_series": 198,
            "pattern_width_samples": [21, 29],
            "n_markers_per_series": 8,
            "spacing_samples": [40, 80],
            "noise_period_samples": 75.0,
            "noise_rate": 0.5,
            "pattern_jitter": 0.2,
            "warp_strength": 0.05
        }"#;
        let from_reordered = parse_benchmark_config_json(reordered).unwrap();
        assert_eq!(config_hash(&config), config_hash(&from_reordered));

        assert!(parse_benchmark_config_json(r#"{"n_series": 0}"#).is_err());
    }

    #[test]
    fn sweep_csv_shape() {
        use crate::pipeline::{Method, SweepRow};
        let report = SweepReport {
            rows: vec![
                SweepRow {
                    noise_rate: 0.1,
                    method: Method::DtwBaseline,
                    series_id: 19,
                    error_samples: 4.25,
                },
                SweepRow {
                    noise_rate: 0.1,
                    method: Method::CcaDtw,
                    series_id: 19,
                    error_samples: 1.5,
                },
            ],
        };
        let csv = sweep_to_csv(&report);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "noise_rate,method,series_id,error_samples"
        );
        assert_eq!(lines.next().unwrap(), "0.1,dtw_baseline,19,4.25");
        assert_eq!(lines.next().unwrap(), "0.1,cca_dtw,19,1.5");
    }

    #[test]
    fn marker_class_field_name() {
        let m = Marker::new(0.0, 1.0, 3);
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"class\":3"));
    }
}
