use crate::data::Dataset;
use crate::error::{Error, Result};

use super::config::{EstimatorConfig, Mode, Resolved};
use super::engine::{self, max_norm, FilterResult};

/// MMW filter for inliers with covariance at most the identity.
///
/// Expects pruned, centered data. Epochs stop once the spectral estimate
/// falls to `100·γ₂`; within an epoch, scores whose weighted sum exceeds
/// `λ₀/5` trigger a 1D filter pass with `b = ¼`.
pub fn que_score_filter(data: &Dataset, cfg: &EstimatorConfig) -> Result<FilterResult> {
    let res = cfg.resolve(data.n(), data.d(), max_norm(data))?;
    que_score_filter_resolved(data, cfg, &res)
}

pub fn que_score_filter_resolved(
    data: &Dataset,
    cfg: &EstimatorConfig,
    res: &Resolved,
) -> Result<FilterResult> {
    if cfg.mode != Mode::BoundedCov {
        return Err(Error::Config("que_score_filter needs mode bounded_cov".into()));
    }
    engine::run(data, cfg, res)
}
