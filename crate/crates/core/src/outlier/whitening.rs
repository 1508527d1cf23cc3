use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Condition number beyond which the exact transform is refused.
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhiteningKind {
    Exact,
    TopK(usize),
    Identity,
}

/// Exponent applied to the covariance eigenvalues.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhitenPower {
    /// `Σ^{−1/2}`, which makes the reference isotropic.
    #[default]
    InvSqrt,
    /// `Σ^{−1}`.
    Inv,
}

impl WhitenPower {
    fn apply(self, lambda: f64) -> f64 {
        match self {
            WhitenPower::InvSqrt => lambda.sqrt().recip(),
            WhitenPower::Inv => lambda.recip(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhiteningTransform {
    pub kind: WhiteningKind,
    pub power: WhitenPower,
    pub ridge: f64,
    /// Symmetric `d × d` map; `None` for the identity.
    pub matrix: Option<DMatrix<f64>>,
}

/// Fits `(Cov + ridge·Id)^{−1/2}` (exact) or
/// `Σ_{i≤k} (λ_i + ridge)^{−1/2} v_i v_iᵀ + Π_⊥` (top-k) on the reference.
pub fn fit_whitening(
    reference: &Dataset,
    kind: WhiteningKind,
    ridge: f64,
    power: WhitenPower,
) -> Result<WhiteningTransform> {
    if !(ridge > 0.0 && ridge.is_finite()) {
        return Err(Error::Config(format!("ridge {ridge} must be positive")));
    }
    let (n, d) = (reference.n(), reference.d());
    let matrix = match kind {
        WhiteningKind::Identity => None,
        WhiteningKind::Exact | WhiteningKind::TopK(_) => {
            let xc = reference.centered_at(&reference.mean())?.into_matrix();
            let cov = xc.tr_mul(&xc) / n as f64;
            let eig = SymmetricEigen::new(cov);
            let mut idx: Vec<usize> = (0..d).collect();
            idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let k = match kind {
                WhiteningKind::TopK(k) => {
                    if k == 0 || k > d {
                        return Err(Error::Config(format!("top-k whitening needs 1 <= k <= {d}")));
                    }
                    k
                }
                _ => {
                    if n < d + 1 {
                        return Err(Error::SingularReference);
                    }
                    d
                }
            };
            let shifted: Vec<f64> = idx[..k].iter().map(|&i| eig.eigenvalues[i] + ridge).collect();
            let smallest = shifted.iter().copied().fold(f64::INFINITY, f64::min);
            if smallest <= 0.0 || shifted[0] / smallest > MAX_CONDITION {
                return Err(Error::SingularReference);
            }
            let mut w = DMatrix::identity(d, d);
            for (&i, &lambda) in idx[..k].iter().zip(&shifted) {
                let v = eig.eigenvectors.column(i);
                // Replace the unit eigenvalue of the identity with lambda^power.
                w.ger(power.apply(lambda) - 1.0, &v, &v, 1.0);
            }
            Some((&w + w.transpose()) * 0.5)
        }
    };
    Ok(WhiteningTransform {
        kind,
        power,
        ridge,
        matrix,
    })
}

/// Maps every sample `x` to `W x`.
pub fn apply_whitening(w: &WhiteningTransform, data: &Dataset) -> Result<Dataset> {
    match &w.matrix {
        None => Ok(data.clone()),
        Some(m) => {
            if m.nrows() != data.d() {
                return Err(Error::DimensionMismatch {
                    expected: m.nrows(),
                    got: data.d(),
                });
            }
            Dataset::new(data.matrix() * m)
        }
    }
}
