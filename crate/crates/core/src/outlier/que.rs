use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matexp::{density_from_symmetric, gaussian_sketch, SketchParams, DENSE_LIMIT};
use crate::spectral::{estimate_spectral_norm, SymOperator};

/// Degree of the Chebyshev approximation used in approximate mode.
pub const CHEBYSHEV_DEGREE: usize = 5;

/// What the exponent `α·Σ̄` is divided by before exponentiating.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentScale {
    /// `exp(α Σ̄/‖Σ̄‖₂)`: scale-free in the data.
    #[default]
    SpectralNorm,
    /// `exp(α Σ̄)`.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueMode {
    Exact,
    Approx,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QueConfig {
    pub scale: ExponentScale,
    /// Sketch width for approximate mode; defaults as for the estimators.
    pub r: Option<usize>,
}

/// Empirical mean-centered data and `Σ̄ = XᵀX/n` (1/n normalization).
pub(crate) fn centered_cov(data: &Dataset) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if data.n() < 2 {
        return Err(Error::InvalidDataset(format!(
            "need at least 2 samples, got {}",
            data.n()
        )));
    }
    let xc = data.centered_at(&data.mean())?.into_matrix();
    let cov = xc.tr_mul(&xc) / data.n() as f64;
    if cov.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateCovariance);
    }
    Ok((xc, cov))
}

/// Chebyshev coefficients `c_k = 2·I_k(1)` of `exp` on `[−1, 1]`, where `I_k`
/// is the modified Bessel function of the first kind.
pub fn chebyshev_exp_coefficients(degree: usize) -> Vec<f64> {
    (0..=degree)
        .map(|k| {
            let mut term = 0.5f64.powi(k as i32) / (1..=k).map(|j| j as f64).product::<f64>();
            let mut sum = 0.0;
            for m in 0..30 {
                sum += term;
                term *= 0.25 / ((m + 1) as f64 * (m + 1 + k) as f64);
            }
            2.0 * sum
        })
        .collect()
}

/// `Σ'_k c_k T_k(B)·V` by Clenshaw's recurrence (the first term halved).
pub fn chebyshev_block<O: SymOperator + ?Sized>(
    op: &O,
    coeffs: &[f64],
    v: &DMatrix<f64>,
) -> DMatrix<f64> {
    let mut b1 = DMatrix::zeros(v.nrows(), v.ncols());
    let mut b2 = b1.clone();
    for &c in coeffs.iter().skip(1).rev() {
        let mut next = op.apply_block(&b1) * 2.0;
        next -= &b2;
        next += v * c;
        b2 = std::mem::replace(&mut b1, next);
    }
    let mut out = op.apply_block(&b1);
    out -= &b2;
    out += v * (0.5 * coeffs[0]);
    out
}

/// `scale·XᵀX` for an `n × d` matrix `X`, applied implicitly.
struct GramOperator<'a> {
    x: &'a DMatrix<f64>,
    scale: f64,
}

impl SymOperator for GramOperator<'_> {
    fn dim(&self) -> usize {
        self.x.ncols()
    }

    fn apply_block(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        self.x.tr_mul(&(self.x * v)) * self.scale
    }
}

/// Number of squarings `⌈log₂ max(1, y)⌉` for an exponent of norm `y`.
pub fn squarings(y: f64) -> u32 {
    y.max(1.0).log2().ceil() as u32
}

/// QUE scores `τ_i = X_iᵀ exp(Y) X_i / tr exp(Y)` for the centered samples,
/// with `Y = α·Σ̄/‖Σ̄‖₂` (or `α·Σ̄` under [`ExponentScale::Raw`]).
///
/// Exact mode eigendecomposes `Σ̄`. Approximate mode evaluates `exp(Y/2)` on a
/// Gaussian sketch with a degree-5 Chebyshev polynomial and
/// `⌈log₂ max(1, ‖Y‖)⌉` squarings, then scores `‖A X_i‖²/‖A‖_F²`.
pub fn que_scores<R: Rng + ?Sized>(
    data: &Dataset,
    alpha: f64,
    mode: QueMode,
    cfg: &QueConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!("alpha {alpha} must be finite and >= 0")));
    }
    let (xc, cov) = centered_cov(data)?;
    let d = data.d();
    match mode {
        QueMode::Exact => {
            if d > DENSE_LIMIT {
                return Err(Error::TooLarge {
                    d,
                    limit: DENSE_LIMIT,
                });
            }
            let top = SymmetricEigen::new(cov.clone()).eigenvalues.max();
            let factor = match cfg.scale {
                ExponentScale::SpectralNorm => alpha / top,
                ExponentScale::Raw => alpha,
            };
            let u = density_from_symmetric(cov * factor);
            let z = &xc * &u;
            Ok(z.row_iter()
                .zip(xc.row_iter())
                .map(|(a, b)| a.dot(&b).max(0.0))
                .collect())
        }
        QueMode::Approx => {
            let n = data.n() as f64;
            let gram = GramOperator { x: &xc, scale: 1.0 / n };
            let norm = estimate_spectral_norm(&gram, 0.1, 0.01, rng)?.value;
            if norm <= 0.0 {
                return Err(Error::DegenerateCovariance);
            }
            let y_norm = match cfg.scale {
                ExponentScale::SpectralNorm => alpha,
                ExponentScale::Raw => alpha * norm,
            };
            let s = squarings(y_norm);
            // Apply exp(Y/2) = C(Y/2^{s+1})^{2^s}; the argument has norm ≤ ½.
            let scale = y_norm / norm / n / 2f64.powi(s as i32 + 1);
            let r = cfg
                .r
                .unwrap_or_else(|| SketchParams::default_for(data.n(), d, 0.1).r);
            let start = if r >= d {
                DMatrix::identity(d, d)
            } else {
                gaussian_sketch(r, d, rng.random()).transpose()
            };
            let coeffs = chebyshev_exp_coefficients(CHEBYSHEV_DEGREE);
            let op = GramOperator { x: &xc, scale };
            let mut block = start;
            if d < 2 * CHEBYSHEV_DEGREE * block.ncols() {
                let dense = op.apply_block(&DMatrix::identity(d, d));
                for _ in 0..(1u64 << s) {
                    block = chebyshev_block(&dense, &coeffs, &block);
                }
            } else {
                for _ in 0..(1u64 << s) {
                    block = chebyshev_block(&op, &coeffs, &block);
                }
            }
            let trace = block.norm_squared();
            let proj = &xc * &block;
            Ok(proj.row_iter().map(|r| r.norm_squared() / trace).collect())
        }
    }
}
