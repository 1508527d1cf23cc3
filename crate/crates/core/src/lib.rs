//! Quantum-entropy (QUE) outlier scoring and nearly-linear-time robust mean
//! estimation under adversarial corruption.
//!
//! The crate is organised bottom-up:
//!
//! - [`data`], [`moments`], [`spectral`], [`reduce`]: datasets, weight
//!   vectors, weighted means and covariances as implicit operators, power
//!   iteration, and bucketing.
//! - [`matexp`]: Taylor-polynomial matrix exponentials applied to sums of
//!   weighted covariances, the Gaussian sketch and the exact / sketched score
//!   oracles.
//! - [`filter`]: the univariate soft downweighting filter and its randomized
//!   hard-removal counterpart.
//! - [`robust`]: naive pruning, the matrix-multiplicative-weights filters for
//!   bounded covariance and sub-Gaussian inliers, and the end-to-end pipeline.
//! - [`outlier`]: QUE scoring for outlier detection, baselines, whitening and
//!   ROCAUC.
//! - [`synth`]: synthetic inlier/outlier generators used by the CLI and tests.
//! - [`record`]: a serializable snapshot of one experiment run.

pub mod data;
pub mod error;
pub mod filter;
pub mod matexp;
pub mod moments;
pub mod outlier;
pub mod record;
pub mod reduce;
pub mod robust;
pub mod spectral;
pub mod synth;

pub use data::{Dataset, WeightVector};
pub use error::{Error, Result};
