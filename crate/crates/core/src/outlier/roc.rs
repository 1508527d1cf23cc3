use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a tied outlier/inlier pair counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    #[default]
    Half,
    /// Ties count fully, as in `P(τ_out ≥ τ_in)`.
    Geq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScores {
    pub tau: Vec<f64>,
    /// `true` marks an outlier.
    pub labels: Vec<bool>,
}

/// Probability that a random outlier outscores a random inlier.
pub fn rocauc(scored: &LabeledScores, ties: TieRule) -> Result<f64> {
    let LabeledScores { tau, labels } = scored;
    if tau.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: tau.len(),
            got: labels.len(),
        });
    }
    let n_out = labels.iter().filter(|&&l| l).count();
    let n_in = labels.len() - n_out;
    if n_out == 0 || n_in == 0 {
        return Err(Error::OneClassOnly);
    }
    let mut order: Vec<usize> = (0..tau.len()).collect();
    order.sort_by(|&a, &b| tau[a].partial_cmp(&tau[b]).unwrap_or(Ordering::Equal));
    let tie_weight = match ties {
        TieRule::Half => 0.5,
        TieRule::Geq => 1.0,
    };
    let (mut inliers_below, mut wins) = (0usize, 0.0);
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && tau[order[end]] == tau[order[start]] {
            end += 1;
        }
        let group = &order[start..end];
        let out_here = group.iter().filter(|&&i| labels[i]).count();
        let in_here = group.len() - out_here;
        wins += out_here as f64 * (inliers_below as f64 + tie_weight * in_here as f64);
        inliers_below += in_here;
        start = end;
    }
    Ok(wins / (n_out as f64 * n_in as f64))
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let avg = (start + end - 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut num, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        num += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return Ok(0.0);
    }
    Ok(num / (va * vb).sqrt())
}

/// Indices that sort `x` ascending; ties keep index order.
pub fn argsort(x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(Ordering::Equal));
    order
}
