//! Outlier scoring: QUE scores, the ℓ₂ and naive-spectral baselines,
//! whitening, and ROCAUC.

mod baselines;
mod que;
mod roc;
mod whitening;

pub use baselines::{baseline_l2, baseline_spectral, SPECTRAL_ITERATIONS};
pub use que::{
    chebyshev_block, chebyshev_exp_coefficients, que_scores, squarings, ExponentScale, QueConfig,
    QueMode, CHEBYSHEV_DEGREE,
};
pub use roc::{argsort, rocauc, spearman, LabeledScores, TieRule};
pub use whitening::{
    apply_whitening, fit_whitening, WhitenPower, WhiteningKind, WhiteningTransform,
};
