//! Weighted means and weighted covariances.
//!
//! `M(w) = Σ_i w_i (X_i − μ(w))(X_i − μ(w))ᵀ` is the *unnormalized* weighted
//! covariance: there is no `1/|w|` factor. It is only ever applied implicitly
//! unless a caller asks for the dense matrix.

use nalgebra::{DMatrix, DVector};

use crate::data::{check_dim, Dataset, WeightVector};
use crate::error::Result;
use crate::spectral::{estimate_spectral_norm, power_schedule, SpectralEstimate, SymOperator};
use rand::Rng;

/// `μ(w) = (1/|w|) Σ w_i X_i`.
pub fn weighted_mean(data: &Dataset, w: &WeightVector) -> Result<DVector<f64>> {
    check_dim(data.n(), w.len())?;
    w.ensure_mass()?;
    let mut mu = data.matrix().tr_mul(&w.as_dvector());
    mu /= w.mass();
    Ok(mu)
}

/// `M(w)·v` in `O(nd)`.
pub fn weighted_cov_matvec(
    data: &Dataset,
    w: &WeightVector,
    v: &DVector<f64>,
) -> Result<DVector<f64>> {
    let op = WeightedCovOperator::new(data, w)?;
    check_dim(data.d(), v.len())?;
    Ok(op.apply(v))
}

/// `(M(w) − Id)·v` in `O(nd)`.
pub fn weighted_cov_shifted_matvec(
    data: &Dataset,
    w: &WeightVector,
    v: &DVector<f64>,
) -> Result<DVector<f64>> {
    let op = WeightedCovOperator::new(data, w)?.shifted(1.0);
    check_dim(data.d(), v.len())?;
    Ok(op.apply(v))
}

/// Dense `M(w)`, `O(nd²)`.
pub fn dense_weighted_cov(data: &Dataset, w: &WeightVector) -> Result<DMatrix<f64>> {
    Ok(WeightedCovOperator::new(data, w)?.dense())
}

/// Estimates `‖M(w) − shift·Id‖₂` by power iteration.
///
/// When `d` is below the total number of power iterations the operator is
/// formed densely first (`O(nd²)` once instead of `O(nd)` per iteration);
/// both routes run the same power method.
pub fn estimate_weighted_cov_norm<R: Rng + ?Sized>(
    data: &Dataset,
    w: &WeightVector,
    shift: f64,
    accuracy: f64,
    fail_prob: f64,
    rng: &mut R,
) -> Result<SpectralEstimate> {
    let op = WeightedCovOperator::new(data, w)?.shifted(shift);
    let (iterations, restarts) = power_schedule(data.d(), accuracy, fail_prob);
    if data.d() < iterations * restarts {
        estimate_spectral_norm(&op.dense(), accuracy, fail_prob, rng)
    } else {
        estimate_spectral_norm(&op, accuracy, fail_prob, rng)
    }
}

/// `M(w) − shift·Id` as an implicit symmetric operator.
///
/// Holds a centered, `√w`-scaled copy of the data so that each block
/// application is two thin matrix products.
#[derive(Debug, Clone)]
pub struct WeightedCovOperator {
    scaled: DMatrix<f64>,
    mean: DVector<f64>,
    shift: f64,
}

impl WeightedCovOperator {
    pub fn new(data: &Dataset, w: &WeightVector) -> Result<Self> {
        let mean = weighted_mean(data, w)?;
        let mut scaled = data.matrix().clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            let s = w.as_slice()[i].sqrt();
            row -= mean.transpose();
            row *= s;
        }
        Ok(Self {
            scaled,
            mean,
            shift: 0.0,
        })
    }

    pub fn shifted(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// `M(w) − shift·Id` formed densely.
    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = self.scaled.tr_mul(&self.scaled);
        for i in 0..m.nrows() {
            m[(i, i)] -= self.shift;
        }
        m
    }
}

impl SymOperator for WeightedCovOperator {
    fn dim(&self) -> usize {
        self.scaled.ncols()
    }

    fn apply_block(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let proj = &self.scaled * v;
        let mut out = self.scaled.tr_mul(&proj);
        if self.shift != 0.0 {
            out -= v * self.shift;
        }
        out
    }
}
