//! Univariate downweighting: the soft 1D filter and its randomized hard
//! counterpart.

use rand::Rng;

use crate::data::{check_dim, WeightVector};
use crate::error::{Error, Result};

/// Largest exponent the soft filter will search.
pub const MAX_STEPS: u64 = 1 << 60;

/// Default target fraction for the bounded-covariance filter.
pub const DEFAULT_B: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub new_weights: WeightVector,
    pub steps_taken: u64,
    pub final_weighted_sum: f64,
}

fn validate(tau: &[f64], b: f64) -> Result<()> {
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::InvalidB(b));
    }
    if let Some((index, &value)) = tau
        .iter()
        .enumerate()
        .find(|(_, t)| !(t.is_finite() && **t >= 0.0))
    {
        return Err(Error::NegativeScore { index, value });
    }
    Ok(())
}

/// `x^t` by repeated squaring.
fn pow_u64(mut x: f64, mut t: u64) -> f64 {
    let mut acc = 1.0;
    while t > 0 {
        if t & 1 == 1 {
            acc *= x;
        }
        x *= x;
        t >>= 1;
    }
    acc
}

/// `F_t = Σ w_i (1 − τ_i/τ_max)^t τ_i`.
pub fn decayed_sum(w: &[f64], tau: &[f64], tau_max: f64, t: u64) -> f64 {
    w.iter()
        .zip(tau)
        .map(|(wi, ti)| wi * pow_u64(1.0 - ti / tau_max, t) * ti)
        .sum()
}

fn decayed_weights(w: &[f64], tau: &[f64], tau_max: f64, t: u64) -> Vec<f64> {
    w.iter()
        .zip(tau)
        .map(|(wi, ti)| wi * pow_u64(1.0 - ti / tau_max, t))
        .collect()
}

/// Soft downweighting `w_i ← (1 − τ_i/τ_max)^t w_i` with the smallest `t ≥ 1`
/// for which `Σ w_i^(t) τ_i ≤ b·σ`, where `σ = Σ w_i τ_i`.
pub fn one_d_filter(w: &WeightVector, tau: &[f64], b: f64) -> Result<FilterOutcome> {
    check_dim(w.len(), tau.len())?;
    validate(tau, b)?;
    let ws = w.as_slice();
    let sigma: f64 = ws.iter().zip(tau).map(|(a, t)| a * t).sum();
    let tau_max = tau.iter().copied().fold(0.0, f64::max);
    if sigma == 0.0 || tau_max == 0.0 {
        return Ok(FilterOutcome {
            new_weights: w.clone(),
            steps_taken: 0,
            final_weighted_sum: sigma,
        });
    }
    let target = b * sigma;
    let bound = (tau_max / (std::f64::consts::E * target)).ceil();
    let mut hi = if bound >= MAX_STEPS as f64 {
        MAX_STEPS
    } else {
        (bound as u64).max(1)
    };
    // The bound is exact in real arithmetic; rounding can leave F_hi a hair above target.
    while decayed_sum(ws, tau, tau_max, hi) > target {
        if hi >= MAX_STEPS {
            return Err(Error::NonTermination { rounds: MAX_STEPS as usize });
        }
        hi = hi.saturating_mul(2).min(MAX_STEPS);
    }
    let mut lo = 1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if decayed_sum(ws, tau, tau_max, mid) <= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let new_w = decayed_weights(ws, tau, tau_max, lo);
    let final_weighted_sum = new_w.iter().zip(tau).map(|(a, t)| a * t).sum();
    Ok(FilterOutcome {
        new_weights: WeightVector::new(new_w)?,
        steps_taken: lo,
        final_weighted_sum,
    })
}

/// Round cap `⌈4·ln(τ_max·m/(bσ) + 2)·ln(2/δ)⌉` for [`random_filter`].
pub fn random_filter_round_cap(tau_max: f64, m: usize, b: f64, sigma: f64, delta: f64) -> usize {
    let ratio = tau_max * m as f64 / (b * sigma);
    (4.0 * (ratio + 2.0).ln() * (2.0 / delta).ln()).ceil().max(1.0) as usize
}

/// Randomized hard filter over the index set `indices`; `tau` is indexed by
/// sample index. Each round removes every surviving `i` independently with
/// probability `τ_i/τ_max` (maximum over the survivors) until
/// `Σ_{i∈T} τ_i ≤ b·σ`, with `σ` fixed at entry. Survivors keep their input order.
pub fn random_filter<R: Rng + ?Sized>(
    indices: &[usize],
    tau: &[f64],
    b: f64,
    delta: f64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    validate(tau, b)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta {delta} not in (0, 1)")));
    }
    if let Some(&i) = indices.iter().find(|&&i| i >= tau.len()) {
        return Err(Error::DimensionMismatch {
            expected: tau.len(),
            got: i + 1,
        });
    }
    let mut alive: Vec<usize> = indices.to_vec();
    let sigma: f64 = alive.iter().map(|&i| tau[i]).sum();
    if sigma == 0.0 {
        return Ok(alive);
    }
    let target = b * sigma;
    let tau_max0 = alive.iter().map(|&i| tau[i]).fold(0.0, f64::max);
    let cap = random_filter_round_cap(tau_max0, alive.len(), b, sigma, delta);
    let mut rounds = 0;
    while alive.iter().map(|&i| tau[i]).sum::<f64>() > target {
        rounds += 1;
        if rounds > cap {
            return Err(Error::NonTermination { rounds: cap });
        }
        let tau_max = alive.iter().map(|&i| tau[i]).fold(0.0, f64::max);
        alive.retain(|&i| rng.random::<f64>() >= tau[i] / tau_max);
    }
    Ok(alive)
}
