use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::spectral::top_eigenvector;

use super::que::centered_cov;

/// Power iterations used for the top eigenvector of `Σ̄`.
pub const SPECTRAL_ITERATIONS: usize = 2000;

/// `‖X_i − μ̄‖₂`.
pub fn baseline_l2(data: &Dataset) -> Result<Vec<f64>> {
    if data.n() < 2 {
        return Err(Error::InvalidDataset(format!(
            "need at least 2 samples, got {}",
            data.n()
        )));
    }
    let xc = data.centered_at(&data.mean())?;
    Ok(xc.matrix().row_iter().map(|r| r.norm()).collect())
}

/// `⟨X_i − μ̄, v⟩²` for the top eigenvector `v` of `Σ̄`.
pub fn baseline_spectral<R: Rng + ?Sized>(data: &Dataset, rng: &mut R) -> Result<Vec<f64>> {
    let (xc, cov) = centered_cov(data)?;
    let v = top_eigenvector(&cov, SPECTRAL_ITERATIONS, rng)?;
    Ok((xc * v).iter().map(|p| p * p).collect())
}
