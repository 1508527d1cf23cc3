//! Robust mean estimation: pruning, the two MMW filters and the end-to-end pipeline.

mod bounded;
pub mod config;
pub mod engine;
mod pipeline;
mod prune;
mod subgaussian;
pub mod trace;

pub use bounded::{que_score_filter, que_score_filter_resolved};
pub use config::{EstimatorConfig, Mode, Resolved};
pub use engine::FilterResult;
pub use pipeline::{estimate_mean_pipeline, prune_radius, PipelineResult, PipelineSummary};
pub use prune::{naive_prune, prune_rounds};
pub use subgaussian::{sg_que_score_filter, sg_que_score_filter_resolved};
pub use trace::{EpochRecord, EpochTrace, FilterCall};
