//! Dynamic time warping between one-dimensional series.
//!
//! Full O(N_A * N_B) dynamic program over the squared-difference local cost
//! with the standard three-step pattern. Backtracking breaks ties
//! deterministically (diagonal, then vertical, then horizontal), so the
//! returned path is reproducible across runs and platforms. An optional
//! Sakoe-Chiba band bounds |i - j| for long series; it is off by default.

use crate::error::{Error, Result};
use crate::model::{Alignment, TimeSeries};

/// Band constraint. `window` is the Sakoe-Chiba half-width in samples;
/// `None` leaves the warp unconstrained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DtwConfig {
    pub window: Option<usize>,
}

impl DtwConfig {
    pub fn with_window(window: usize) -> Self {
        Self {
            window: Some(window),
        }
    }
}

/// Squared difference.
#[inline]
pub fn local_cost(u: f64, v: f64) -> f64 {
    let d = u - v;
    d * d
}

/// Optimal monotone alignment of `a` to `b` under the squared-difference
/// cost. The returned path runs from `(0, 0)` to `(len_a-1, len_b-1)` in
/// unit steps and its total cost is minimal over all such paths.
pub fn dtw_align(a: &TimeSeries, b: &TimeSeries, config: &DtwConfig) -> Result<Alignment> {
    let xs = a.values();
    let ys = b.values();
    let n = xs.len();
    let m = ys.len();

    if let Some(w) = config.window {
        if n.abs_diff(m) > w {
            return Err(Error::InfeasibleWindow {
                window: w,
                len_a: n,
                len_b: m,
            });
        }
    }

    let band = |i: usize| -> (usize, usize) {
        match config.window {
            Some(w) => (i.saturating_sub(w), (i + w).min(m - 1)),
            None => (0, m - 1),
        }
    };

    let mut cost = vec![f64::INFINITY; n * m];
    for i in 0..n {
        let (j_lo, j_hi) = band(i);
        for j in j_lo..=j_hi {
            let local = local_cost(xs[i], ys[j]);
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cost[j - 1],
                (_, 0) => cost[(i - 1) * m],
                _ => {
                    let diag = cost[(i - 1) * m + j - 1];
                    let vert = cost[(i - 1) * m + j];
                    let horz = cost[i * m + j - 1];
                    diag.min(vert).min(horz)
                }
            };
            cost[i * m + j] = local + best;
        }
    }

    let total_cost = cost[n * m - 1];
    debug_assert!(total_cost.is_finite());

    // Backtrack, preferring diagonal over vertical over horizontal on ties.
    let mut path = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n - 1, m - 1);
    path.push((i, j));
    while i > 0 || j > 0 {
        let diag = if i > 0 && j > 0 {
            cost[(i - 1) * m + j - 1]
        } else {
            f64::INFINITY
        };
        let vert = if i > 0 {
            cost[(i - 1) * m + j]
        } else {
            f64::INFINITY
        };
        let horz = if j > 0 {
            cost[i * m + j - 1]
        } else {
            f64::INFINITY
        };
        let best = diag.min(vert).min(horz);
        if diag == best {
            i -= 1;
            j -= 1;
        } else if vert == best {
            i -= 1;
        } else {
            j -= 1;
        }
        path.push((i, j));
    }
    path.reverse();

    Ok(Alignment::from_backtrack(path, total_cost))
}
