//! Time-delay embedding: each sample becomes a window of its neighborhood.
//!
//! Out-of-range window positions replicate the nearest boundary value, so a
//! series of length N always embeds to N rows and row indices stay in
//! one-to-one correspondence with sample indices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::model::TimeSeries;

/// Window shape: `past` samples back, `future` samples forward, plus the
/// sample itself. Dimension M = past + future + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub past: usize,
    pub future: usize,
}

impl EmbeddingConfig {
    pub fn new(past: usize, future: usize) -> Self {
        Self { past, future }
    }

    pub fn symmetric(half: usize) -> Self {
        Self {
            past: half,
            future: half,
        }
    }

    pub fn dim(&self) -> usize {
        self.past + self.future + 1
    }
}

impl Default for EmbeddingConfig {
    /// 20 samples back and 20 forward (M = 41).
    fn default() -> Self {
        Self::symmetric(20)
    }
}

/// Row k is the embedded vector of sample k.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSeries {
    vectors: DMatrix<f64>,
    config: EmbeddingConfig,
}

impl EmbeddedSeries {
    pub fn rows(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn config(&self) -> EmbeddingConfig {
        self.config
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn row(&self, k: usize) -> Vec<f64> {
        self.vectors.row(k).iter().cloned().collect()
    }
}

/// Embeds every sample of the series into an M-dimensional window, with edge
/// replication at the boundaries.
pub fn embed(series: &TimeSeries, config: EmbeddingConfig) -> EmbeddedSeries {
    let values = series.values();
    let n = values.len();
    let m = config.dim();
    let past = config.past as i64;
    let vectors = DMatrix::from_fn(n, m, |k, c| {
        let idx = (k as i64 + c as i64 - past).clamp(0, n as i64 - 1);
        values[idx as usize]
    });
    EmbeddedSeries { vectors, config }
}
