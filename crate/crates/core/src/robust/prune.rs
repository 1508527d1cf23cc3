use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Number of attempts `⌈log₂(2/δ)⌉` made by [`naive_prune`].
pub fn prune_rounds(delta: f64) -> usize {
    (2.0 / delta).log2().ceil().max(1.0) as usize
}

/// Picks random samples until one has strictly more than `n/2` samples within
/// `2r`, then keeps every sample within `4r` of it. Returns the kept samples
/// and their original indices.
pub fn naive_prune<R: Rng + ?Sized>(
    data: &Dataset,
    radius: f64,
    delta: f64,
    rng: &mut R,
) -> Result<(Dataset, Vec<usize>)> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Config(format!("prune radius {radius} must be positive")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta {delta} not in (0, 1)")));
    }
    let n = data.n();
    let x = data.matrix();
    let rounds = prune_rounds(delta);
    let (near, far) = ((2.0 * radius).powi(2), (4.0 * radius).powi(2));
    for _ in 0..rounds {
        let c = x.row(rng.random_range(0..n)).into_owned();
        let dist2: Vec<f64> = x.row_iter().map(|r| (r - &c).norm_squared()).collect();
        let close = dist2.iter().filter(|&&d| d <= near).count();
        if 2 * close > n {
            let keep: Vec<usize> = (0..n).filter(|&i| dist2[i] <= far).collect();
            return Ok((data.select(&keep)?, keep));
        }
    }
    Err(Error::PruneFailed { rounds })
}
