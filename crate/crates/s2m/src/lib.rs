//! Signal-to-model (S2M) alignment.
//!
//! Locates patterns in a time series when the reference is not another
//! series but a blueprint listing where patterns should be. The blueprint
//! is synthesized into a reference series, both series are mapped into a
//! learned one-dimensional latent space where they are maximally correlated
//! (time-delay embedding followed by CCA projections), and dynamic time
//! warping aligns the latent series. Mapping the blueprint markers through
//! the warping path yields pattern locations in samples.
//!
//! Modules follow the processing stages:
//!
//! * [`model`] — blueprints, series, warping paths, marker mapping
//! * [`synthesis`] — binary and replication synthesis of reference series
//! * [`embedding`] — time-delay embedding
//! * [`cca`] — covariance pooling and the canonical-correlation solve
//! * [`dtw`] — dynamic time warping
//! * [`pipeline`] — training, test alignment, the plain-DTW baseline,
//!   localization error, cross-validation, noise sweeps
//! * [`datagen`] — the seeded synthetic benchmark
//! * [`io`] — file formats
//! * [`cli`] — the `s2m` binary
//! * [`rng`] — the frozen deterministic generator behind the benchmark

pub mod cca;
pub mod cli;
pub mod datagen;
pub mod dtw;
pub mod embedding;
pub mod error;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod synthesis;

pub use error::{Error, Result};
