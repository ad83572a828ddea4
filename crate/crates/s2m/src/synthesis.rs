//! Reference-series synthesis from a blueprint model.
//!
//! Binary synthesis paints 1 inside marker ranges and 0 outside. Replication
//! synthesis pastes a template waveform, linearly resampled to each marker's
//! width, onto a zero background. Both are deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AlignedModel, Model, SampleMarker, TimeSeries};

/// Trailing room left after the last marker when synthesizing a reference
/// series, as a factor on the last marker end.
pub const LENGTH_SLACK: f64 = 1.05;

/// Length of a synthesized reference series: the last marker end in samples
/// times [`LENGTH_SLACK`], rounded half-up. Always long enough to contain
/// the last marker.
pub fn reference_length(max_end_samples: f64) -> usize {
    let rounded = crate::model::round_half_up(max_end_samples * LENGTH_SLACK);
    let floor = crate::model::round_half_up(max_end_samples) + 2;
    rounded.max(floor).max(1) as usize
}

/// An extracted pattern waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub values: Vec<f64>,
    #[serde(rename = "class")]
    pub class_id: u32,
}

impl Template {
    pub fn new(values: Vec<f64>, class_id: u32) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyTemplate);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self { values, class_id })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Linearly resamples `values` to `width` equispaced points spanning the
/// whole template. A single-point query reads the template midpoint.
pub(crate) fn resample_linear(values: &[f64], width: usize) -> Vec<f64> {
    debug_assert!(!values.is_empty());
    debug_assert!(width >= 1);
    let len = values.len();
    if width == len {
        return values.to_vec();
    }
    if len == 1 {
        return vec![values[0]; width];
    }
    let last = (len - 1) as f64;
    (0..width)
        .map(|k| {
            let pos = if width == 1 {
                last / 2.0
            } else {
                k as f64 * last / (width - 1) as f64
            };
            let i0 = pos.floor() as usize;
            if i0 >= len - 1 {
                values[len - 1]
            } else {
                let frac = pos - i0 as f64;
                values[i0] * (1.0 - frac) + values[i0 + 1] * frac
            }
        })
        .collect()
}

fn check_markers_fit(markers: &[SampleMarker], length: usize) -> Result<()> {
    for (index, m) in markers.iter().enumerate() {
        if m.start < 0 || m.end < m.start || m.end >= length as i64 {
            return Err(Error::MarkerOutOfRange {
                index,
                start: m.start,
                end: m.end,
                len: length,
            });
        }
    }
    Ok(())
}

/// Binary synthesis over markers already in sample coordinates.
pub fn synthesize_binary_samples(markers: &[SampleMarker], length: usize) -> Result<TimeSeries> {
    if length == 0 {
        return Err(Error::EmptySeries);
    }
    check_markers_fit(markers, length)?;
    let mut values = vec![0.0; length];
    for m in markers {
        for v in &mut values[m.start as usize..=m.end as usize] {
            *v = 1.0;
        }
    }
    TimeSeries::new(values)
}

/// Series of the given length that is 1 inside every marker range of the
/// model (inclusive) and 0 outside.
pub fn synthesize_binary(model: &Model, length: usize) -> Result<TimeSeries> {
    synthesize_binary_samples(&model.marker_samples()?, length)
}

/// Replication synthesis over markers already in sample coordinates.
pub fn synthesize_replication_samples(
    markers: &[SampleMarker],
    template: &Template,
    length: usize,
) -> Result<TimeSeries> {
    if length == 0 {
        return Err(Error::EmptySeries);
    }
    check_markers_fit(markers, length)?;
    let mut values = vec![0.0; length];
    for m in markers {
        let pattern = resample_linear(&template.values, m.width());
        values[m.start as usize..=m.end as usize].copy_from_slice(&pattern);
    }
    TimeSeries::new(values)
}

/// Zero background with the template resampled into every marker range.
pub fn synthesize_replication(
    model: &Model,
    template: &Template,
    length: usize,
) -> Result<TimeSeries> {
    synthesize_replication_samples(&model.marker_samples()?, template, length)
}

/// Extracts the waveform under one marker of an aligned model as a template.
pub fn extract_template(
    series: &TimeSeries,
    aligned: &AlignedModel,
    marker_index: usize,
) -> Result<Template> {
    let marker = aligned
        .markers
        .get(marker_index)
        .ok_or(Error::MarkerIndexOutOfRange {
            index: marker_index,
            len: aligned.markers.len(),
        })?;
    if marker.start < 0 || marker.end >= series.len() as i64 {
        return Err(Error::MarkerOutOfRange {
            index: marker_index,
            start: marker.start,
            end: marker.end,
            len: series.len(),
        });
    }
    Template::new(
        series.values()[marker.start as usize..=marker.end as usize].to_vec(),
        marker.class_id,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Marker;

    fn model_from_samples(ranges: &[(f64, f64)]) -> Model {
        Model::new(
            ranges.iter().map(|&(s, e)| Marker::new(s, e, 0)).collect(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn binary_empty_model() {
        let m = Model::new(vec![], 1.0).unwrap();
        let s = synthesize_binary(&m, 5).unwrap();
        assert_eq!(s.values(), &[0.0; 5]);
    }

    #[test]
    fn binary_single_marker() {
        let m = model_from_samples(&[(1.0, 3.0)]);
        let s = synthesize_binary(&m, 5).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn binary_two_markers() {
        let m = model_from_samples(&[(0.0, 1.0), (3.0, 4.0)]);
        let s = synthesize_binary(&m, 5).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn binary_marker_exceeding_length_errors() {
        let m = model_from_samples(&[(1.0, 6.0)]);
        assert!(matches!(
            synthesize_binary(&m, 5),
            Err(Error::MarkerOutOfRange { .. })
        ));
    }

    #[test]
    fn replication_constant_template_broadcasts() {
        let m = model_from_samples(&[(2.0, 4.0)]);
        let t = Template::new(vec![1.0], 0).unwrap();
        let s = synthesize_replication(&m, &t, 6).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn replication_resamples_linearly() {
        // Hand interpolation of [0,2,0] at 5 equispaced points:
        // positions 0, 0.5, 1, 1.5, 2 -> 0, 1, 2, 1, 0.
        let m = model_from_samples(&[(0.0, 4.0)]);
        let t = Template::new(vec![0.0, 2.0, 0.0], 0).unwrap();
        let s = synthesize_replication(&m, &t, 5).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn replication_exact_width_copies_verbatim() {
        let m = model_from_samples(&[(1.0, 3.0)]);
        let t = Template::new(vec![0.25, 0.5, 0.125], 0).unwrap();
        let s = synthesize_replication(&m, &t, 5).unwrap();
        assert_eq!(s.values(), &[0.0, 0.25, 0.5, 0.125, 0.0]);
    }

    #[test]
    fn replication_with_unit_template_equals_binary() {
        let m = model_from_samples(&[(1.0, 3.0), (6.0, 8.0)]);
        let t = Template::new(vec![1.0], 0).unwrap();
        let a = synthesize_replication(&m, &t, 10).unwrap();
        let b = synthesize_binary(&m, 10).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn binary_is_exactly_the_marker_union() {
        let m = model_from_samples(&[(2.0, 5.0), (7.0, 8.0)]);
        let s = synthesize_binary(&m, 10).unwrap();
        for (k, &v) in s.values().iter().enumerate() {
            let inside = (2..=5).contains(&k) || (7..=8).contains(&k);
            assert_eq!(v, if inside { 1.0 } else { 0.0 }, "index {k}");
        }
    }

    #[test]
    fn extract_template_slices() {
        let s = TimeSeries::new(vec![5.0, 6.0, 7.0, 8.0]).unwrap();
        let am = AlignedModel::new(vec![SampleMarker::new(1, 2, 3)]).unwrap();
        let t = extract_template(&s, &am, 0).unwrap();
        assert_eq!(t.values, vec![6.0, 7.0]);
        assert_eq!(t.class_id, 3);
    }

    #[test]
    fn extract_single_sample_template() {
        let s = TimeSeries::new(vec![5.0, 6.0]).unwrap();
        let am = AlignedModel::new(vec![SampleMarker::new(0, 0, 0)]).unwrap();
        let t = extract_template(&s, &am, 0).unwrap();
        assert_eq!(t.values, vec![5.0]);
    }

    #[test]
    fn extract_out_of_range_errors() {
        let s = TimeSeries::new(vec![1.0, 2.0]).unwrap();
        let am = AlignedModel::new(vec![SampleMarker::new(1, 4, 0)]).unwrap();
        assert!(extract_template(&s, &am, 0).is_err());
        assert!(matches!(
            extract_template(&s, &am, 1),
            Err(Error::MarkerIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn resample_midpoint_for_single_output() {
        assert_eq!(resample_linear(&[0.0, 2.0, 0.0], 1), vec![2.0]);
        assert_eq!(resample_linear(&[1.0, 3.0], 1), vec![2.0]);
    }
}
