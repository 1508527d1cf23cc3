//! Bucketing reduction from small corruption fractions to the constant-ε regime.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Randomly permutes the samples, splits them into `⌊10εn⌋` buckets of
/// `⌊1/(10ε)⌋` samples each (dropping the remainder), and returns the
/// bucket averages.
pub fn bucket_reduce<R: Rng + ?Sized>(data: &Dataset, eps: f64, rng: &mut R) -> Result<Dataset> {
    let n = data.n();
    let (buckets, size) = bucket_shape(n, eps)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let x = data.matrix();
    let out = DMatrix::from_fn(buckets, data.d(), |b, j| {
        let members = &order[b * size..(b + 1) * size];
        members.iter().map(|&i| x[(i, j)]).sum::<f64>() / size as f64
    });
    Dataset::new(out)
}

/// `(bucket count, bucket size)` for `n` samples at corruption level `eps`.
pub fn bucket_shape(n: usize, eps: f64) -> Result<(usize, usize)> {
    const TOL: f64 = 1e-9;
    if !(eps > 0.0 && eps <= 0.05) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let buckets = (10.0 * eps * n as f64 + TOL).floor() as usize;
    let size = (1.0 / (10.0 * eps) + TOL).floor() as usize;
    if buckets == 0 || size == 0 || buckets * size > n {
        return Err(Error::InvalidEpsilon(eps));
    }
    Ok((buckets, size))
}
