//! The epoch/iteration loop shared by both MMW filters.

use std::cmp::Ordering;
use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, WeightVector};
use crate::error::{Error, Result};
use crate::filter::{one_d_filter, DEFAULT_B};
use crate::matexp::{
    build_sketched_oracle, exact_scores, sketched_scores, OracleKind, ScoreReport, SketchParams,
    WeightHistory,
};
use crate::moments::{estimate_weighted_cov_norm, weighted_mean};

use super::config::{EstimatorConfig, Mode, Resolved};
use super::trace::{EpochRecord, EpochTrace, FilterCall};

const POWER_ACCURACY: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct FilterResult {
    pub mu: DVector<f64>,
    pub weights: WeightVector,
    pub trace: EpochTrace,
}

struct Variant {
    shift: f64,
    stop: f64,
    epoch_ratio: f64,
}

impl Variant {
    fn for_mode(mode: Mode, res: &Resolved, cfg: &EstimatorConfig) -> Self {
        match mode {
            Mode::BoundedCov => Self {
                shift: 0.0,
                stop: 100.0 * res.gamma2,
                epoch_ratio: 2.0 / 3.0,
            },
            Mode::Subgaussian => Self {
                shift: 1.0,
                stop: cfg.xi_scale * res.xi,
                epoch_ratio: 0.5,
            },
        }
    }
}

/// Scores from the configured oracle for the current history.
pub fn oracle_scores(
    data: &Dataset,
    history: &WeightHistory,
    w: &WeightVector,
    kind: OracleKind,
    params: &SketchParams,
    seed: u64,
) -> Result<ScoreReport> {
    match kind {
        OracleKind::Exact => exact_scores(data, history, w),
        OracleKind::Sketched => {
            let oracle = build_sketched_oracle(data, history, params, seed)?;
            sketched_scores(&oracle, data, w, params.q_form)
        }
    }
}

/// Indices sorted by score descending, ties by index ascending.
pub fn descending_order(tau: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..tau.len()).collect();
    order.sort_by(|&a, &b| {
        tau[b]
            .partial_cmp(&tau[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Smallest prefix of `order` whose weight reaches `target` (all of it if none does).
pub fn percentile_prefix(w: &[f64], order: &[usize], target: f64) -> usize {
    let mut acc = 0.0;
    for (k, &i) in order.iter().enumerate() {
        acc += w[i];
        if acc >= target {
            return k + 1;
        }
    }
    order.len()
}

/// Runs the 1D filter on the `2ε`-heaviest-scoring prefix and leaves the rest.
pub fn top_fraction_filter(w: &WeightVector, tau: &[f64], eps: f64) -> Result<WeightVector> {
    let order = descending_order(tau);
    let m = percentile_prefix(w.as_slice(), &order, 2.0 * eps);
    let top = &order[..m];
    let sub_w = WeightVector::new(top.iter().map(|&i| w.as_slice()[i]).collect())?;
    let sub_tau: Vec<f64> = top.iter().map(|&i| tau[i]).collect();
    let out = one_d_filter(&sub_w, &sub_tau, DEFAULT_B)?;
    let mut next = w.as_slice().to_vec();
    for (&i, &v) in top.iter().zip(out.new_weights.as_slice()) {
        next[i] = v;
    }
    WeightVector::new(next)
}

pub(crate) fn run(data: &Dataset, cfg: &EstimatorConfig, res: &Resolved) -> Result<FilterResult> {
    let v = Variant::for_mode(cfg.mode, res, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = WeightVector::uniform(data.n());
    let mut trace = EpochTrace::default();
    let estimate = |w: &WeightVector, rng: &mut ChaCha8Rng| -> Result<f64> {
        Ok(estimate_weighted_cov_norm(data, w, v.shift, POWER_ACCURACY, res.call_delta, rng)?.value)
    };

    for epoch in 0..res.epoch_cap {
        let started = Instant::now();
        let lambda0 = estimate(&w, &mut rng)?;
        if lambda0 <= v.stop {
            trace.epochs.push(EpochRecord {
                lambda0,
                lambdas: vec![lambda0],
                lambda_end: None,
                alpha: None,
                iterations: 0,
                filter_calls: 0,
                mass_removed: 0.0,
                wall_time_secs: started.elapsed().as_secs_f64(),
            });
            let mu = weighted_mean(data, &w)?;
            return Ok(FilterResult {
                mu,
                weights: w,
                trace,
            });
        }

        let alpha = 1.0 / (1.1 * lambda0);
        let mut history = WeightHistory::new(alpha)?;
        // M(w_j) ⪯ M(w_0) for w_j ≤ w_0, so every feedback shares this bound.
        let norm_bound = v.shift + lambda0 / (1.0 - POWER_ACCURACY);
        let mass_start = w.mass();
        let mut lambdas = vec![lambda0];
        let mut lambda_end = None;
        let mut iterations = 0;
        let mut filter_calls = 0;
        for t in 0..res.iter_cap {
            if t > 0 {
                let lt = estimate(&w, &mut rng)?;
                if lt <= v.epoch_ratio * lambda0 {
                    lambda_end = Some(lt);
                    break;
                }
                lambdas.push(lt);
            }
            iterations += 1;
            let report = oracle_scores(data, &history, &w, cfg.oracle, &res.sketch, rng.random())?;
            let keep = match cfg.mode {
                Mode::BoundedCov => {
                    let s: f64 = report
                        .tau
                        .iter()
                        .zip(w.as_slice())
                        .map(|(t, wi)| t * wi)
                        .sum();
                    s <= lambda0 / 5.0
                }
                Mode::Subgaussian => report.q.unwrap_or(f64::INFINITY) <= lambda0 / (1.1 * 5.0),
            };
            let next = if keep {
                w.clone()
            } else {
                filter_calls += 1;
                let next = match cfg.mode {
                    Mode::BoundedCov => one_d_filter(&w, &report.tau, DEFAULT_B)?.new_weights,
                    Mode::Subgaussian => top_fraction_filter(&w, &report.tau, cfg.eps)?,
                };
                if cfg.record_filter_calls {
                    trace.calls.push(FilterCall {
                        epoch,
                        before: w.as_slice().to_vec(),
                        tau: report.tau.clone(),
                        after: next.as_slice().to_vec(),
                    });
                }
                next
            };
            history.push_with_norm_bound(data, next.clone(), norm_bound)?;
            w = next;
        }
        let lambda_end = match lambda_end {
            Some(l) => l,
            None => estimate(&w, &mut rng)?,
        };
        trace.epochs.push(EpochRecord {
            lambda0,
            lambdas,
            lambda_end: Some(lambda_end),
            alpha: Some(alpha),
            iterations,
            filter_calls,
            mass_removed: mass_start - w.mass(),
            wall_time_secs: started.elapsed().as_secs_f64(),
        });
    }
    Err(Error::NonConvergence {
        epochs: res.epoch_cap,
    })
}

/// Largest sample norm, the `κ` used when a filter is called without the pipeline.
pub fn max_norm(data: &Dataset) -> f64 {
    data.matrix()
        .row_iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max)
}
