//! Canonical correlation analysis over time-embedded sample pairs.
//!
//! Covariances are pooled over every row of every training pair with a
//! single pooled mean, ridge-regularized, and the top canonical pair is
//! found by reducing the generalized eigenproblem to a singular value
//! problem: with `Rxx + rI = Lx Lx^T` and `Ryy + rI = Ly Ly^T`, the top
//! singular triple (u, s, v) of `K = Lx^-1 Rxy Ly^-T` gives
//! `w_x = Lx^-T u`, `w_y = Ly^-T v` and the canonical correlation `rho = s`.
//! The projectors come out normalized to unit variance under the
//! regularized metric, and the generalized eigen equations
//! `Rxy w_y = rho (Rxx + rI) w_x` and `Rxy^T w_x = rho (Ryy + rI) w_y`
//! hold to machine precision.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddedSeries, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::model::TimeSeries;

/// Scale factor for the automatic ridge: 1e-6 times the mean diagonal of
/// the pooled autocovariances.
pub const AUTO_RIDGE_SCALE: f64 = 1e-6;

/// Pooled second-order statistics of embedded training pairs.
///
/// `rxx`, `ryy` and `rxy` are the raw pooled covariances (mean-centered,
/// normalized by the total row count); the ridge is stored alongside and
/// applied through [`CovarianceSet::rxx_regularized`] /
/// [`CovarianceSet::ryy_regularized`].
#[derive(Debug, Clone)]
pub struct CovarianceSet {
    rxx: DMatrix<f64>,
    ryy: DMatrix<f64>,
    rxy: DMatrix<f64>,
    ridge: f64,
    sample_count: usize,
    config: EmbeddingConfig,
}

impl CovarianceSet {
    /// Builds a covariance set from explicit matrices, checking symmetry,
    /// dimensions, and (approximate) positive semidefiniteness.
    pub fn from_parts(
        rxx: DMatrix<f64>,
        ryy: DMatrix<f64>,
        rxy: DMatrix<f64>,
        ridge: f64,
        sample_count: usize,
        config: EmbeddingConfig,
    ) -> Result<Self> {
        let m = config.dim();
        for (name, mat) in [("rxx", &rxx), ("ryy", &ryy), ("rxy", &rxy)] {
            if mat.nrows() != m || mat.ncols() != m {
                return Err(Error::InvalidInput(format!(
                    "{name} must be {m}x{m}, got {}x{}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
            if mat.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} has non-finite entries")));
            }
        }
        for (name, mat) in [("rxx", &rxx), ("ryy", &ryy)] {
            let scale = mat.amax().max(1.0);
            if (mat - mat.transpose()).amax() > 1e-10 * scale {
                return Err(Error::InvalidInput(format!("{name} is not symmetric")));
            }
            let min_eig = mat
                .clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min_eig < -1e-10 * scale {
                return Err(Error::InvalidInput(format!(
                    "{name} is not positive semidefinite (min eigenvalue {min_eig})"
                )));
            }
        }
        if !(ridge >= 0.0) || !ridge.is_finite() {
            return Err(Error::InvalidRidge(ridge));
        }
        if sample_count == 0 {
            return Err(Error::InsufficientRows { rows: 0, dim: m });
        }
        Ok(Self {
            rxx,
            ryy,
            rxy,
            ridge,
            sample_count,
            config,
        })
    }

    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    pub fn config(&self) -> EmbeddingConfig {
        self.config
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn rxx(&self) -> &DMatrix<f64> {
        &self.rxx
    }

    pub fn ryy(&self) -> &DMatrix<f64> {
        &self.ryy
    }

    pub fn rxy(&self) -> &DMatrix<f64> {
        &self.rxy
    }

    pub fn rxx_regularized(&self) -> DMatrix<f64> {
        &self.rxx + DMatrix::identity(self.dim(), self.dim()) * self.ridge
    }

    pub fn ryy_regularized(&self) -> DMatrix<f64> {
        &self.ryy + DMatrix::identity(self.dim(), self.dim()) * self.ridge
    }

    /// Mean of the pooled autocovariance diagonals (average per-coordinate
    /// variance across X and Y).
    pub fn mean_diagonal(&self) -> f64 {
        let m = self.dim() as f64;
        (self.rxx.diagonal().sum() + self.ryy.diagonal().sum()) / (2.0 * m)
    }

    /// The default data-scaled ridge: [`AUTO_RIDGE_SCALE`] times the mean
    /// autocovariance diagonal.
    pub fn auto_ridge(&self) -> f64 {
        AUTO_RIDGE_SCALE * self.mean_diagonal()
    }

    /// Same statistics with a different ridge.
    pub fn with_ridge(self, ridge: f64) -> Result<Self> {
        if !(ridge >= 0.0) || !ridge.is_finite() {
            return Err(Error::InvalidRidge(ridge));
        }
        Ok(Self { ridge, ..self })
    }
}

/// Pools mean-centered covariances over all rows of all pairs.
///
/// All pairs must share one embedding config and each pair must have equal
/// row counts. Centering uses the pooled mean over every row of every pair;
/// normalization is by the total row count.
pub fn accumulate_covariances(
    pairs: &[(EmbeddedSeries, EmbeddedSeries)],
    ridge: f64,
) -> Result<CovarianceSet> {
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(Error::InvalidRidge(ridge));
    }
    let config = match pairs.first() {
        Some((x, _)) => x.config(),
        None => return Err(Error::InsufficientRows { rows: 0, dim: 1 }),
    };
    let m = config.dim();
    let mut total_rows = 0usize;
    for (x, y) in pairs {
        if x.config() != config || y.config() != config {
            return Err(Error::MixedEmbeddingConfigs);
        }
        if x.rows() != y.rows() {
            return Err(Error::PairLengthMismatch {
                left: x.rows(),
                right: y.rows(),
            });
        }
        total_rows += x.rows();
    }
    if total_rows < m {
        return Err(Error::InsufficientRows {
            rows: total_rows,
            dim: m,
        });
    }

    let n = total_rows as f64;
    let mut mean_x = DVector::<f64>::zeros(m);
    let mut mean_y = DVector::<f64>::zeros(m);
    for (x, y) in pairs {
        mean_x += x.matrix().row_sum_tr();
        mean_y += y.matrix().row_sum_tr();
    }
    mean_x /= n;
    mean_y /= n;

    let mut rxx = DMatrix::<f64>::zeros(m, m);
    let mut ryy = DMatrix::<f64>::zeros(m, m);
    let mut rxy = DMatrix::<f64>::zeros(m, m);
    for (x, y) in pairs {
        let ones = DVector::<f64>::repeat(x.rows(), 1.0);
        let xc = x.matrix() - &ones * mean_x.transpose();
        let yc = y.matrix() - &ones * mean_y.transpose();
        rxx += xc.transpose() * &xc;
        ryy += yc.transpose() * &yc;
        rxy += xc.transpose() * &yc;
    }
    rxx /= n;
    ryy /= n;
    rxy /= n;
    // Enforce exact symmetry against accumulated rounding.
    let rxx = (&rxx + rxx.transpose()) * 0.5;
    let ryy = (&ryy + ryy.transpose()) * 0.5;

    Ok(CovarianceSet {
        rxx,
        ryy,
        rxy,
        ridge,
        sample_count: total_rows,
        config,
    })
}

/// The trained pair of projectors with its canonical correlation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentMap {
    #[serde(flatten)]
    pub embedding: EmbeddingConfig,
    pub ridge: f64,
    pub rho: f64,
    pub w_x: Vec<f64>,
    pub w_y: Vec<f64>,
}

impl LatentMap {
    /// Checks structural invariants (dimensions, finiteness, rho range).
    pub fn validate(&self) -> Result<()> {
        let m = self.embedding.dim();
        if self.w_x.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: self.w_x.len(),
            });
        }
        if self.w_y.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: self.w_y.len(),
            });
        }
        if self.w_x.iter().chain(&self.w_y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite projector entry".into()));
        }
        if !self.rho.is_finite() || !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidInput(format!("rho {} outside [-1, 1]", self.rho)));
        }
        if !(self.ridge >= 0.0) || !self.ridge.is_finite() {
            return Err(Error::InvalidRidge(self.ridge));
        }
        Ok(())
    }

    /// Largest relative residual of the two generalized eigen equations on
    /// the given covariance set.
    pub fn stationarity_residual(&self, covs: &CovarianceSet) -> f64 {
        let wx = DVector::from_column_slice(&self.w_x);
        let wy = DVector::from_column_slice(&self.w_y);
        let lhs_x = covs.rxy() * &wy;
        let rhs_x = covs.rxx_regularized() * &wx * self.rho;
        let lhs_y = covs.rxy().transpose() * &wx;
        let rhs_y = covs.ryy_regularized() * &wy * self.rho;
        let rel = |lhs: &DVector<f64>, rhs: &DVector<f64>| {
            let denom = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
            (lhs - rhs).norm() / denom
        };
        rel(&lhs_x, &rhs_x).max(rel(&lhs_y, &rhs_y))
    }
}

/// Solves for the top canonical pair of the covariance set.
///
/// The output is deterministic: `rho >= 0` and the first nonzero component
/// of `w_x` is positive (`w_x` and `w_y` flip together, which leaves the
/// objective unchanged).
pub fn fit_cca(covs: &CovarianceSet) -> Result<LatentMap> {
    let lx = Cholesky::new(covs.rxx_regularized()).ok_or(Error::SingularCovariance)?;
    let ly = Cholesky::new(covs.ryy_regularized()).ok_or(Error::SingularCovariance)?;
    let lx_l = lx.l();
    let ly_l = ly.l();

    let t1 = lx_l
        .solve_lower_triangular(covs.rxy())
        .ok_or(Error::SingularCovariance)?;
    let k = ly_l
        .solve_lower_triangular(&t1.transpose())
        .ok_or(Error::SingularCovariance)?
        .transpose();

    let svd = k.svd(true, true);
    let u = svd.u.as_ref().ok_or(Error::SingularCovariance)?;
    let v_t = svd.v_t.as_ref().ok_or(Error::SingularCovariance)?;
    let top = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or(Error::SingularCovariance)?;
    let sigma = svd.singular_values[top];

    let u_top = u.column(top).into_owned();
    let v_top = v_t.row(top).transpose();
    let mut w_x = lx_l
        .transpose()
        .solve_upper_triangular(&u_top)
        .ok_or(Error::SingularCovariance)?;
    let mut w_y = ly_l
        .transpose()
        .solve_upper_triangular(&v_top)
        .ok_or(Error::SingularCovariance)?;

    if let Some(first) = w_x.iter().find(|v| **v != 0.0) {
        if *first < 0.0 {
            w_x.neg_mut();
            w_y.neg_mut();
        }
    }

    let map = LatentMap {
        embedding: covs.config(),
        ridge: covs.ridge(),
        rho: sigma.min(1.0),
        w_x: w_x.iter().cloned().collect(),
        w_y: w_y.iter().cloned().collect(),
    };
    map.validate()?;
    Ok(map)
}

/// Projects an embedded series onto a weight vector, one output sample per
/// row.
pub fn project(embedded: &EmbeddedSeries, w: &[f64]) -> Result<TimeSeries> {
    if w.len() != embedded.dim() {
        return Err(Error::DimensionMismatch {
            expected: embedded.dim(),
            got: w.len(),
        });
    }
    let wv = DVector::from_column_slice(w);
    let out = embedded.matrix() * wv;
    TimeSeries::new(out.iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::embed;
    use crate::rng::SplitMix64;

    fn embed_values(values: Vec<f64>, cfg: EmbeddingConfig) -> EmbeddedSeries {
        embed(&TimeSeries::new(values).unwrap(), cfg)
    }

    #[test]
    fn identical_pair_scalar_covariances() {
        let cfg = EmbeddingConfig::new(0, 0);
        let x = embed_values(vec![1.0, 2.0, 3.0, 4.0], cfg);
        let covs = accumulate_covariances(&[(x.clone(), x)], 0.5).unwrap();
        // Population variance of 1..4 is 1.25.
        assert!((covs.rxx()[(0, 0)] - 1.25).abs() < 1e-12);
        assert!((covs.ryy()[(0, 0)] - 1.25).abs() < 1e-12);
        assert!((covs.rxy()[(0, 0)] - 1.25).abs() < 1e-12);
        assert!((covs.rxx_regularized()[(0, 0)] - 1.75).abs() < 1e-12);
    }

    #[test]
    fn constant_pairs_have_zero_covariance() {
        let cfg = EmbeddingConfig::new(1, 1);
        let pairs: Vec<_> = (0..2)
            .map(|_| {
                (
                    embed_values(vec![3.0; 5], cfg),
                    embed_values(vec![7.0; 5], cfg),
                )
            })
            .collect();
        let covs = accumulate_covariances(&pairs, 0.25).unwrap();
        assert!(covs.rxx().amax() < 1e-12);
        assert!(covs.ryy().amax() < 1e-12);
        assert!(covs.rxy().amax() < 1e-12);
        let reg = covs.rxx_regularized();
        for i in 0..3 {
            assert!((reg[(i, i)] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn accumulate_matches_direct_two_column_oracle() {
        let cfg = EmbeddingConfig::new(1, 0);
        let mut rng = SplitMix64::for_case(5, 0);
        let xs: Vec<f64> = (0..200).map(|_| rng.next_signed_unit()).collect();
        let ys: Vec<f64> = (0..200).map(|_| rng.next_signed_unit()).collect();
        let ex = embed_values(xs.clone(), cfg);
        let ey = embed_values(ys.clone(), cfg);
        let covs = accumulate_covariances(&[(ex.clone(), ey.clone())], 0.0).unwrap();

        // Independent O(N * M^2) accumulation from the embedded rows.
        let n = ex.rows();
        let m = cfg.dim();
        let rows_x: Vec<Vec<f64>> = (0..n).map(|k| ex.row(k)).collect();
        let rows_y: Vec<Vec<f64>> = (0..n).map(|k| ey.row(k)).collect();
        let mut mx = vec![0.0; m];
        let mut my = vec![0.0; m];
        for k in 0..n {
            for c in 0..m {
                mx[c] += rows_x[k][c] / n as f64;
                my[c] += rows_y[k][c] / n as f64;
            }
        }
        for a in 0..m {
            for b in 0..m {
                let mut sxx = 0.0;
                let mut syy = 0.0;
                let mut sxy = 0.0;
                for k in 0..n {
                    sxx += (rows_x[k][a] - mx[a]) * (rows_x[k][b] - mx[b]);
                    syy += (rows_y[k][a] - my[a]) * (rows_y[k][b] - my[b]);
                    sxy += (rows_x[k][a] - mx[a]) * (rows_y[k][b] - my[b]);
                }
                assert!((covs.rxx()[(a, b)] - sxx / n as f64).abs() < 1e-12);
                assert!((covs.ryy()[(a, b)] - syy / n as f64).abs() < 1e-12);
                assert!((covs.rxy()[(a, b)] - sxy / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn accumulate_rejects_bad_inputs() {
        let cfg = EmbeddingConfig::new(0, 0);
        let a = embed_values(vec![1.0, 2.0], cfg);
        let b = embed_values(vec![1.0, 2.0, 3.0], cfg);
        assert!(matches!(
            accumulate_covariances(&[(a.clone(), b.clone())], 0.0),
            Err(Error::PairLengthMismatch { .. })
        ));
        let c = embed_values(vec![1.0, 2.0], EmbeddingConfig::new(1, 0));
        assert!(matches!(
            accumulate_covariances(&[(a.clone(), c)], 0.0),
            Err(Error::MixedEmbeddingConfigs)
        ));
        assert!(matches!(
            accumulate_covariances(&[(a.clone(), a.clone())], -1.0),
            Err(Error::InvalidRidge(_))
        ));
        let wide = EmbeddingConfig::new(3, 3);
        let short = embed_values(vec![1.0, 2.0], wide);
        assert!(matches!(
            accumulate_covariances(&[(short.clone(), short)], 0.0),
            Err(Error::InsufficientRows { .. })
        ));
    }

    #[test]
    fn perfect_scalar_correlation() {
        let cfg = EmbeddingConfig::new(0, 0);
        let x = embed_values(vec![1.0, 2.0, 3.0, 4.0, 5.0], cfg);
        let covs = accumulate_covariances(&[(x.clone(), x)], 0.0).unwrap();
        let map = fit_cca(&covs).unwrap();
        assert!((map.rho - 1.0).abs() < 1e-12);
        // Variance of 1..5 is 2, so w = 1/std = 1/sqrt(2).
        let expected = 1.0 / 2.0f64.sqrt();
        assert!((map.w_x[0] - expected).abs() < 1e-12);
        assert!((map.w_y[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn independent_series_have_near_zero_rho() {
        let cfg = EmbeddingConfig::new(0, 0);
        let mut rng = SplitMix64::for_case(6, 0);
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.next_signed_unit()).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.next_signed_unit()).collect();
        let covs = accumulate_covariances(
            &[(embed_values(xs.clone(), cfg), embed_values(ys.clone(), cfg))],
            0.0,
        )
        .unwrap();
        let map = fit_cca(&covs).unwrap();
        assert!(map.rho < 0.1, "rho = {}", map.rho);

        // Direct scalar correlation oracle.
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (mean(&xs), mean(&ys));
        let mut sxx = 0.0;
        let mut syy = 0.0;
        let mut sxy = 0.0;
        for k in 0..n {
            sxx += (xs[k] - mx) * (xs[k] - mx);
            syy += (ys[k] - my) * (ys[k] - my);
            sxy += (xs[k] - mx) * (ys[k] - my);
        }
        let direct = (sxy / (sxx * syy).sqrt()).abs();
        assert!((map.rho - direct).abs() < 1e-10);
    }

    /// Brute-force grid search over unit-circle direction pairs.
    fn grid_search_rho(covs: &CovarianceSet, step: f64) -> f64 {
        let rxx = covs.rxx_regularized();
        let ryy = covs.ryy_regularized();
        let rxy = covs.rxy();
        let steps = (std::f64::consts::PI / step).ceil() as usize;
        let dirs: Vec<(f64, f64)> = (0..steps)
            .map(|k| {
                let th = k as f64 * step;
                (th.cos(), th.sin())
            })
            .collect();
        let ny: Vec<f64> = dirs
            .iter()
            .map(|&(c, s)| {
                (ryy[(0, 0)] * c * c + 2.0 * ryy[(0, 1)] * c * s + ryy[(1, 1)] * s * s).sqrt()
            })
            .collect();
        let mut best: f64 = 0.0;
        for &(cx, sx) in &dirs {
            let nx =
                (rxx[(0, 0)] * cx * cx + 2.0 * rxx[(0, 1)] * cx * sx + rxx[(1, 1)] * sx * sx)
                    .sqrt();
            let a0 = rxy[(0, 0)] * cx + rxy[(1, 0)] * sx;
            let a1 = rxy[(0, 1)] * cx + rxy[(1, 1)] * sx;
            for (k, &(cy, sy)) in dirs.iter().enumerate() {
                let num = (a0 * cy + a1 * sy).abs();
                best = best.max(num / (nx * ny[k]));
            }
        }
        best
    }

    fn random_joint_covariance(rng: &mut SplitMix64, ridge: f64) -> CovarianceSet {
        // Sample a random 4x4 PSD matrix and take its 2x2 blocks, so the
        // cross block is always realizable and rho <= 1.
        let n = 12;
        let h = DMatrix::from_fn(n, 4, |_, _| rng.next_signed_unit());
        let joint = h.transpose() * &h / n as f64;
        let rxx = joint.view((0, 0), (2, 2)).into_owned();
        let ryy = joint.view((2, 2), (2, 2)).into_owned();
        let rxy = joint.view((0, 2), (2, 2)).into_owned();
        CovarianceSet::from_parts(rxx, ryy, rxy, ridge, n, EmbeddingConfig::new(1, 0)).unwrap()
    }

    #[test]
    fn two_dimensional_rho_matches_grid_search() {
        let mut rng = SplitMix64::for_case(6, 1);
        for _ in 0..5 {
            let covs = random_joint_covariance(&mut rng, 1e-6);
            let map = fit_cca(&covs).unwrap();
            let brute = grid_search_rho(&covs, 0.001);
            assert!(
                (map.rho - brute).abs() < 1e-3,
                "rho {} vs grid {}",
                map.rho,
                brute
            );
        }
    }

    #[test]
    fn stationarity_and_normalization_hold() {
        let mut rng = SplitMix64::for_case(6, 2);
        for i in 0..20 {
            let ridge = if i % 2 == 0 { 0.0 } else { 1e-4 };
            let covs = random_joint_covariance(&mut rng, ridge);
            let map = fit_cca(&covs).unwrap();
            assert!(map.stationarity_residual(&covs) < 1e-10);
            let wx = DVector::from_column_slice(&map.w_x);
            let wy = DVector::from_column_slice(&map.w_y);
            let nx = (wx.transpose() * covs.rxx_regularized() * &wx)[(0, 0)];
            let ny = (wy.transpose() * covs.ryy_regularized() * &wy)[(0, 0)];
            assert!((nx - 1.0).abs() < 1e-9);
            assert!((ny - 1.0).abs() < 1e-9);
            assert!((0.0..=1.0).contains(&map.rho));
        }
    }

    #[test]
    fn sign_convention_is_deterministic() {
        let mut rng = SplitMix64::for_case(6, 3);
        let covs = random_joint_covariance(&mut rng, 1e-8);
        let a = fit_cca(&covs).unwrap();
        let b = fit_cca(&covs).unwrap();
        assert_eq!(a, b);
        assert!(a.w_x.iter().find(|v| **v != 0.0).map(|v| *v > 0.0).unwrap_or(true));
    }

    #[test]
    fn power_of_two_rescaling_is_exact() {
        let cfg = EmbeddingConfig::new(1, 1);
        let mut rng = SplitMix64::for_case(6, 4);
        let xs: Vec<f64> = (0..300).map(|_| rng.next_signed_unit()).collect();
        let ys: Vec<f64> = xs.iter().map(|v| v + 0.3 * rng.next_signed_unit()).collect();
        let base = accumulate_covariances(
            &[(embed_values(xs.clone(), cfg), embed_values(ys.clone(), cfg))],
            0.0,
        )
        .unwrap();
        let scaled_xs: Vec<f64> = xs.iter().map(|v| 4.0 * v).collect();
        let scaled = accumulate_covariances(
            &[(embed_values(scaled_xs, cfg), embed_values(ys, cfg))],
            0.0,
        )
        .unwrap();
        let m1 = fit_cca(&base).unwrap();
        let m2 = fit_cca(&scaled).unwrap();
        assert!((m1.rho - m2.rho).abs() < 1e-14);
        for (a, b) in m1.w_x.iter().zip(&m2.w_x) {
            assert!((a / 4.0 - b).abs() < 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn scale_invariance_general_factor() {
        let cfg = EmbeddingConfig::new(1, 0);
        let mut rng = SplitMix64::for_case(6, 5);
        let xs: Vec<f64> = (0..200).map(|_| rng.next_signed_unit()).collect();
        let ys: Vec<f64> = xs.iter().map(|v| 2.0 * v + 0.1 * rng.next_signed_unit()).collect();
        let c = 3.7;
        let base = accumulate_covariances(
            &[(embed_values(xs.clone(), cfg), embed_values(ys.clone(), cfg))],
            0.0,
        )
        .unwrap();
        let scaled = accumulate_covariances(
            &[(
                embed_values(xs.iter().map(|v| c * v).collect(), cfg),
                embed_values(ys.clone(), cfg),
            )],
            0.0,
        )
        .unwrap();
        let m1 = fit_cca(&base).unwrap();
        let m2 = fit_cca(&scaled).unwrap();
        assert!((m1.rho - m2.rho).abs() < 1e-8);

        // Projected series agree once the 1/c rescaling of w_x is applied.
        let p1 = project(&embed_values(xs.clone(), cfg), &m1.w_x).unwrap();
        let p2 = project(
            &embed_values(xs.iter().map(|v| c * v).collect(), cfg),
            &m2.w_x,
        )
        .unwrap();
        for (a, b) in p1.values().iter().zip(p2.values()) {
            assert!((a - b).abs() < 1e-6 * a.abs().max(1.0));
        }
    }

    #[test]
    fn project_center_coordinate_recovers_interior() {
        let cfg = EmbeddingConfig::new(1, 1);
        let vals = vec![5.0, 1.0, 4.0, 2.0, 8.0];
        let e = embed_values(vals.clone(), cfg);
        let p = project(&e, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(p.values(), &vals[..]);
    }

    #[test]
    fn project_zero_weights_gives_zeros() {
        let e = embed_values(vec![1.0, 2.0, 3.0], EmbeddingConfig::new(2, 0));
        let p = project(&e, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn project_matches_dot_product_loop() {
        let cfg = EmbeddingConfig::new(2, 1);
        let mut rng = SplitMix64::for_case(6, 6);
        let vals: Vec<f64> = (0..50).map(|_| rng.next_signed_unit()).collect();
        let w: Vec<f64> = (0..cfg.dim()).map(|_| rng.next_signed_unit()).collect();
        let e = embed_values(vals, cfg);
        let p = project(&e, &w).unwrap();
        for k in 0..e.rows() {
            let expected: f64 = e.row(k).iter().zip(&w).map(|(a, b)| a * b).sum();
            assert!((p.values()[k] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn project_dimension_mismatch_errors() {
        let e = embed_values(vec![1.0, 2.0], EmbeddingConfig::new(0, 0));
        assert!(matches!(
            project(&e, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_embedding_projection_roundtrip() {
        let vals = vec![0.5, -1.5, 2.5];
        let e = embed_values(vals.clone(), EmbeddingConfig::new(0, 0));
        let p = project(&e, &[1.0]).unwrap();
        assert_eq!(p.values(), &vals[..]);
    }

    #[test]
    fn singular_covariance_is_an_error() {
        let cfg = EmbeddingConfig::new(1, 1);
        let x = embed_values(vec![2.0; 10], cfg);
        let covs = accumulate_covariances(&[(x.clone(), x)], 0.0).unwrap();
        assert!(matches!(fit_cca(&covs), Err(Error::SingularCovariance)));
        // A positive ridge repairs it.
        let covs = {
            let x = embed_values(vec![2.0; 10], cfg);
            accumulate_covariances(&[(x.clone(), x)], 1e-6).unwrap()
        };
        assert!(fit_cca(&covs).is_ok());
    }
}
