use crate::data::Dataset;
use crate::error::{Error, Result};

use super::config::{EstimatorConfig, Mode, Resolved};
use super::engine::{self, max_norm, FilterResult};

/// MMW filter for isotropic sub-Gaussian inliers.
///
/// Tracks `‖M(w) − Id‖₂` and stops at `C·ξ`. When the augmented score
/// exceeds `λ₀/5.5`, only the highest-scoring samples holding `2ε` of the
/// weight are passed to the 1D filter.
pub fn sg_que_score_filter(data: &Dataset, cfg: &EstimatorConfig) -> Result<FilterResult> {
    let res = cfg.resolve(data.n(), data.d(), max_norm(data))?;
    sg_que_score_filter_resolved(data, cfg, &res)
}

pub fn sg_que_score_filter_resolved(
    data: &Dataset,
    cfg: &EstimatorConfig,
    res: &Resolved,
) -> Result<FilterResult> {
    if cfg.mode != Mode::Subgaussian {
        return Err(Error::Config("sg_que_score_filter needs mode subgaussian".into()));
    }
    engine::run(data, cfg, res)
}
