//! Blueprint models, time series, warping paths, and marker mapping.
//!
//! A [`Model`] lists where patterns are expected in physical units (for
//! instance millimeters along a tube); an [`Alignment`] is a monotone warping
//! path between two series; mapping blueprint markers through an alignment
//! yields an [`AlignedModel`] with positions in samples. All types are
//! immutable after construction and all operations are pure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, ModelIssue, Result};

/// One expected pattern: start and end in physical units plus a class label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub start: f64,
    pub end: f64,
    #[serde(rename = "class")]
    pub class_id: u32,
}

impl Marker {
    pub fn new(start: f64, end: f64, class_id: u32) -> Self {
        Self {
            start,
            end,
            class_id,
        }
    }
}

/// A blueprint: ordered, non-overlapping markers plus a unit-to-sample scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub samples_per_unit: f64,
    pub markers: Vec<Marker>,
}

impl Model {
    /// Builds a model and validates it.
    pub fn new(markers: Vec<Marker>, samples_per_unit: f64) -> Result<Self> {
        let model = Self {
            samples_per_unit,
            markers,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks every invariant and reports all violations, not just the first.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        if !(self.samples_per_unit > 0.0) || !self.samples_per_unit.is_finite() {
            issues.push(ModelIssue::NonPositiveScale);
        }
        for (i, m) in self.markers.iter().enumerate() {
            if !m.start.is_finite() || !m.end.is_finite() {
                issues.push(ModelIssue::NonFiniteMarker { index: i });
                continue;
            }
            if m.start >= m.end {
                issues.push(ModelIssue::ReversedMarker { index: i });
            }
            if i > 0 {
                let prev = &self.markers[i - 1];
                if m.start < prev.start {
                    issues.push(ModelIssue::UnsortedMarker { index: i });
                } else if m.start < prev.end {
                    issues.push(ModelIssue::Overlap { index: i });
                }
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(issues))
        }
    }

    /// Marker positions converted to sample indices (rounded half-up).
    pub fn marker_samples(&self) -> Result<Vec<SampleMarker>> {
        self.validate()?;
        Ok(self
            .markers
            .iter()
            .map(|m| SampleMarker {
                start: round_half_up(m.start * self.samples_per_unit),
                end: round_half_up(m.end * self.samples_per_unit),
                class_id: m.class_id,
            })
            .collect())
    }

    /// Largest marker end, in samples (unrounded).
    pub fn max_end_samples(&self) -> f64 {
        self.markers
            .iter()
            .map(|m| m.end * self.samples_per_unit)
            .fold(0.0, f64::max)
    }
}

/// Rounds half-up to the nearest integer: 0.5 -> 1, -0.5 -> 0.
pub(crate) fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

/// A marker in sample coordinates (inclusive range).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleMarker {
    pub start: i64,
    pub end: i64,
    #[serde(rename = "class")]
    pub class_id: u32,
}

impl SampleMarker {
    pub fn new(start: i64, end: i64, class_id: u32) -> Self {
        Self {
            start,
            end,
            class_id,
        }
    }

    /// Number of samples covered, inclusive of both ends.
    pub fn width(&self) -> usize {
        (self.end - self.start + 1).max(0) as usize
    }
}

/// A model that has been aligned to a concrete series: marker positions in
/// samples, nondecreasing starts, `start <= end` per marker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedModel {
    pub markers: Vec<SampleMarker>,
}

impl AlignedModel {
    pub fn new(markers: Vec<SampleMarker>) -> Result<Self> {
        for (i, m) in markers.iter().enumerate() {
            if m.start < 0 {
                return Err(Error::InvalidAlignedModel(format!(
                    "negative start at index {i}"
                )));
            }
            if m.start > m.end {
                return Err(Error::InvalidAlignedModel(format!(
                    "start > end at index {i}"
                )));
            }
            if i > 0 && m.start < markers[i - 1].start {
                return Err(Error::InvalidAlignedModel(format!(
                    "decreasing start at index {i}"
                )));
            }
        }
        Ok(Self { markers })
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    /// Errors if any marker falls outside `[0, len)`.
    pub fn check_within(&self, len: usize) -> Result<()> {
        for (i, m) in self.markers.iter().enumerate() {
            if m.start < 0 || m.end >= len as i64 {
                return Err(Error::MarkerOutOfRange {
                    index: i,
                    start: m.start,
                    end: m.end,
                    len,
                });
            }
        }
        Ok(())
    }
}

/// A uniformly sampled series of finite values, at least one sample long.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Z-scored copy: zero mean, unit variance. A constant series maps to
    /// all zeros.
    pub fn zscored(&self) -> TimeSeries {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let var = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        let values = if std > 0.0 {
            self.values.iter().map(|v| (v - mean) / std).collect()
        } else {
            vec![0.0; self.values.len()]
        };
        TimeSeries { values }
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// A monotone warping path between series A and B plus its total cost.
///
/// Invariants: the path starts at `(0, 0)`, ends at `(len_a-1, len_b-1)`,
/// and consecutive pairs differ by `(1,0)`, `(0,1)` or `(1,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    path: Vec<(usize, usize)>,
    total_cost: f64,
}

impl Alignment {
    /// Validates path invariants; `total_cost` is trusted as supplied.
    pub fn new(path: Vec<(usize, usize)>, total_cost: f64) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        if path[0] != (0, 0) {
            return Err(Error::InvalidPath(format!(
                "path starts at {:?}, expected (0, 0)",
                path[0]
            )));
        }
        for (k, w) in path.windows(2).enumerate() {
            let (di, dj) = (
                w[1].0 as i64 - w[0].0 as i64,
                w[1].1 as i64 - w[0].1 as i64,
            );
            if !matches!((di, dj), (1, 0) | (0, 1) | (1, 1)) {
                return Err(Error::InvalidPath(format!(
                    "illegal step {:?} -> {:?} at position {k}",
                    w[0], w[1]
                )));
            }
        }
        if !total_cost.is_finite() || total_cost < 0.0 {
            return Err(Error::InvalidPath(format!(
                "total cost {total_cost} is not a finite nonnegative number"
            )));
        }
        Ok(Self { path, total_cost })
    }

    pub(crate) fn from_backtrack(path: Vec<(usize, usize)>, total_cost: f64) -> Self {
        debug_assert!(Self::new(path.clone(), total_cost).is_ok());
        Self { path, total_cost }
    }

    pub fn path(&self) -> &[(usize, usize)] {
        &self.path
    }

    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    /// Length of series A covered by this path.
    pub fn len_a(&self) -> usize {
        self.path.last().unwrap().0 + 1
    }

    /// Length of series B covered by this path.
    pub fn len_b(&self) -> usize {
        self.path.last().unwrap().1 + 1
    }

    /// Maps an index of series B to an index of series A: the lower median
    /// of all A-indices matched to `j`.
    ///
    /// Within one value of `j` the path advances only in A, so the matches
    /// form a contiguous index run and the lower median is the run start
    /// plus half the run length.
    pub fn map_position(&self, j: usize) -> Result<usize> {
        if j >= self.len_b() {
            return Err(Error::PositionOutOfRange {
                position: j,
                len: self.len_b(),
            });
        }
        let lo = self.path.partition_point(|&(_, pj)| pj < j);
        let hi = self.path.partition_point(|&(_, pj)| pj <= j);
        debug_assert!(lo < hi);
        let run = &self.path[lo..hi];
        Ok(run[(run.len() - 1) / 2].0)
    }

    /// Maps markers given in B-sample coordinates into A-sample coordinates.
    ///
    /// DTW plateaus can swap a start/end pair by one sample; the end is
    /// clamped to `max(start, end)` rather than rejected.
    pub fn map_markers(&self, markers_in_b: &[SampleMarker]) -> Result<AlignedModel> {
        let mut mapped = Vec::with_capacity(markers_in_b.len());
        for (index, m) in markers_in_b.iter().enumerate() {
            if m.start < 0 || m.end < m.start || m.end >= self.len_b() as i64 {
                return Err(Error::MarkerOutOfRange {
                    index,
                    start: m.start,
                    end: m.end,
                    len: self.len_b(),
                });
            }
            let start = self.map_position(m.start as usize)? as i64;
            let end = (self.map_position(m.end as usize)? as i64).max(start);
            mapped.push(SampleMarker::new(start, end, m.class_id));
        }
        AlignedModel::new(mapped)
    }
}

/// Maps one position of series B through an alignment; see
/// [`Alignment::map_position`].
pub fn map_position(alignment: &Alignment, j: usize) -> Result<usize> {
    alignment.map_position(j)
}

/// Maps blueprint markers (in B-sample coordinates) through an alignment;
/// see [`Alignment::map_markers`].
pub fn align_model(alignment: &Alignment, markers_in_b: &[SampleMarker]) -> Result<AlignedModel> {
    alignment.map_markers(markers_in_b)
}
