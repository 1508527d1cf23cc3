use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, WeightVector};
use crate::error::{Error, Result};
use crate::matexp::OracleKind;

use super::config::{EstimatorConfig, Mode, Resolved};
use super::engine;
use super::prune::naive_prune;
use super::trace::EpochTrace;

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub mu_hat: DVector<f64>,
    pub trace: EpochTrace,
    /// Original indices of the samples that survived pruning; final weights
    /// are indexed in this order.
    pub retained: Vec<usize>,
    pub weights: WeightVector,
    pub resolved: Resolved,
    pub seed: u64,
    pub mode: Mode,
    pub oracle: OracleKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub mu_hat: Vec<f64>,
    pub epochs: usize,
    pub retained: usize,
    pub lambda_history: Vec<f64>,
    pub seed: u64,
    pub mode: Mode,
    pub oracle: OracleKind,
}

impl PipelineResult {
    pub fn retained_count(&self) -> usize {
        self.retained.len()
    }

    pub fn summary(&self) -> PipelineSummary {
        PipelineSummary {
            mu_hat: self.mu_hat.iter().copied().collect(),
            epochs: self.trace.epochs.len(),
            retained: self.retained_count(),
            lambda_history: self.trace.lambda_history(),
            seed: self.seed,
            mode: self.mode,
            oracle: self.oracle,
        }
    }
}

/// `√(4dn/δ)` for bounded covariance, `√(4d·ln(n/δ))` for sub-Gaussian data.
pub fn prune_radius(mode: Mode, n: usize, d: usize, delta: f64) -> f64 {
    let (n, d) = (n as f64, d as f64);
    match mode {
        Mode::BoundedCov => (4.0 * d * n / delta).sqrt(),
        Mode::Subgaussian => (4.0 * d * (n / delta).ln().max(1.0)).sqrt(),
    }
}

/// Prune, center, filter and un-center.
pub fn estimate_mean_pipeline(data: &Dataset, cfg: &EstimatorConfig) -> Result<PipelineResult> {
    cfg.validate()?;
    if data.n() < 2 {
        return Err(Error::InvalidDataset(format!(
            "need at least 2 samples, got {}",
            data.n()
        )));
    }
    let radius = prune_radius(cfg.mode, data.n(), data.d(), cfg.delta);
    let mut prune_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    prune_rng.set_stream(1);
    let (pruned, retained) = naive_prune(data, radius, cfg.delta / 4.0, &mut prune_rng)?;
    let center = pruned.mean();
    let centered = pruned.centered_at(&center)?;
    let resolved = cfg.resolve(centered.n(), centered.d(), radius)?;
    let out = engine::run(&centered, cfg, &resolved)?;
    Ok(PipelineResult {
        mu_hat: out.mu + center,
        trace: out.trace,
        retained,
        weights: out.weights,
        resolved,
        seed: cfg.seed,
        mode: cfg.mode,
        oracle: cfg.oracle,
    })
}
