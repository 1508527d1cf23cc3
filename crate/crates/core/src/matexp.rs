//! Matrix exponentials of accumulated weighted covariances and the score
//! oracles built on them.
//!
//! For a history of weights `w_0 … w_{t−1}` and learning rate `α` the target
//! density matrix is `U = exp(α Σ_j M(w_j)) / tr exp(α Σ_j M(w_j))` and the
//! score of sample `i` against the current weights `w` is
//! `τ_i = (X_i − μ(w))ᵀ U (X_i − μ(w))`.
//!
//! The exact oracle densifies and eigendecomposes. The sketched oracle forms
//! `A = S · P_ℓ(½ α Σ_j M(w_j))` for a Gaussian `S` with `r` rows, where `P_ℓ`
//! is the degree-`ℓ` Taylor polynomial of `exp`, and reports
//! `τ̃_i = ‖A (X_i − μ(w))‖² / ‖A‖_F²`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{check_dim, Dataset, WeightVector};
use crate::error::{Error, Result};
use crate::moments::{dense_weighted_cov, estimate_weighted_cov_norm, weighted_mean};
use crate::spectral::SymOperator;

/// Largest dimension the exact oracle will densify.
pub const DENSE_LIMIT: usize = 2048;

const DEGREE_CAP: usize = 4096;

/// Ordered weight vectors whose covariances accumulate in the exponent.
#[derive(Debug, Clone)]
pub struct WeightHistory {
    alpha: f64,
    weights: Vec<WeightVector>,
    centers: Vec<DVector<f64>>,
    norm_bounds: Vec<f64>,
}

impl WeightHistory {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Config(format!("alpha {alpha} must be finite and >= 0")));
        }
        Ok(Self {
            alpha,
            weights: Vec::new(),
            centers: Vec::new(),
            norm_bounds: Vec::new(),
        })
    }

    /// Appends `w`, bounding `‖M(w)‖₂` by a power-method estimate.
    pub fn push(&mut self, data: &Dataset, w: WeightVector) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let est = estimate_weighted_cov_norm(data, &w, 0.0, 0.1, 1e-3, &mut rng)?;
        self.push_with_norm_bound(data, w, est.value / 0.9)
    }

    /// Appends `w` with a caller-supplied upper bound on `‖M(w)‖₂`.
    pub fn push_with_norm_bound(
        &mut self,
        data: &Dataset,
        w: WeightVector,
        norm_bound: f64,
    ) -> Result<()> {
        let center = weighted_mean(data, &w)?;
        self.weights.push(w);
        self.centers.push(center);
        self.norm_bounds.push(norm_bound.max(0.0));
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[WeightVector] {
        &self.weights
    }

    pub fn centers(&self) -> &[DVector<f64>] {
        &self.centers
    }

    /// Upper bound on `‖α Σ_j M(w_j)‖₂`.
    pub fn exponent_bound(&self) -> f64 {
        self.alpha * self.norm_bounds.iter().sum::<f64>()
    }
}

/// `Σ_j M(w_j)` as an implicit operator.
///
/// Uses `Σ_j M(w_j) = Σ_i W_i (X_i − c)(X_i − c)ᵀ − Σ_j |w_j| (μ_j − c)(μ_j − c)ᵀ`
/// with `W = Σ_j w_j` and `c` the `W`-weighted mean, so one application costs
/// `O(nd + td)` regardless of the history length.
#[derive(Debug, Clone)]
pub struct HistorySumOperator {
    scaled: DMatrix<f64>,
    corrections: Vec<(f64, DVector<f64>)>,
}

impl HistorySumOperator {
    pub fn new(data: &Dataset, history: &WeightHistory) -> Result<Self> {
        let (n, d) = (data.n(), data.d());
        let mut cumulative = vec![0.0; n];
        let mut total = 0.0;
        for w in history.weights() {
            check_dim(n, w.len())?;
            for (c, wi) in cumulative.iter_mut().zip(w.as_slice()) {
                *c += wi;
            }
            total += w.mass();
        }
        let center = if total > 0.0 {
            data.matrix().tr_mul(&DVector::from_column_slice(&cumulative)) / total
        } else {
            DVector::zeros(d)
        };
        let mut scaled = data.matrix().clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row -= center.transpose();
            row *= cumulative[i].sqrt();
        }
        let corrections = history
            .weights()
            .iter()
            .zip(history.centers())
            .map(|(w, mu)| (w.mass(), mu - &center))
            .collect();
        Ok(Self {
            scaled,
            corrections,
        })
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = self.scaled.tr_mul(&self.scaled);
        for (mass, u) in &self.corrections {
            m.ger(-mass, u, u, 1.0);
        }
        m
    }
}

impl SymOperator for HistorySumOperator {
    fn dim(&self) -> usize {
        self.scaled.ncols()
    }

    fn apply_block(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let proj = &self.scaled * v;
        let mut out = self.scaled.tr_mul(&proj);
        for (mass, u) in &self.corrections {
            let coeff = u.tr_mul(v);
            out.ger(-mass, u, &coeff.transpose(), 1.0);
        }
        out
    }
}

/// `P_ℓ(scale·Y)·V` for a symmetric operator `Y`, by Horner's rule.
pub fn taylor_exp_block<O: SymOperator + ?Sized>(
    op: &O,
    scale: f64,
    ell: usize,
    v: &DMatrix<f64>,
) -> DMatrix<f64> {
    let mut acc = v.clone();
    for j in (1..=ell).rev() {
        let mut next = op.apply_block(&acc);
        next *= scale / j as f64;
        next += v;
        acc = next;
    }
    acc
}

/// `P_ℓ(½ α Σ_j M(w_j))·v`.
pub fn taylor_exp_matvec(
    history: &WeightHistory,
    data: &Dataset,
    ell: usize,
    v: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_dim(data.d(), v.len())?;
    let op = HistorySumOperator::new(data, history)?;
    let block = DMatrix::from_column_slice(v.len(), 1, v.as_slice());
    Ok(taylor_exp_block(&op, 0.5 * history.alpha(), ell, &block)
        .column(0)
        .into_owned())
}

/// `P(Poisson(y) > ell)`, the relative truncation error of `P_ℓ(y)` against `e^y`.
pub fn poisson_upper_tail(y: f64, ell: usize) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let ln_y = y.ln();
    let mut ln_fact = 0.0;
    for j in 2..=ell + 1 {
        ln_fact += (j as f64).ln();
    }
    let mut j = ell + 1;
    let mut log_term = -y + j as f64 * ln_y - ln_fact;
    let mut sum = 0.0;
    loop {
        let term = log_term.exp();
        sum += term;
        if (j as f64) > y && term <= sum * 1e-17 {
            break;
        }
        j += 1;
        log_term += ln_y - (j as f64).ln();
        if j > ell + 100_000 {
            break;
        }
    }
    sum.min(1.0)
}

/// Smallest degree `ℓ ≥ base` with `P(Poisson(y) > ℓ) ≤ e^{−base}`, so that
/// `(1 − e^{−base}) e^λ ≤ P_ℓ(λ) ≤ e^λ` for every `λ ∈ [0, y]`.
pub fn taylor_degree_for(y: f64, base: usize) -> Result<usize> {
    let target = (-(base as f64)).exp();
    let mut ell = base;
    while poisson_upper_tail(y, ell) > target {
        ell += 1;
        if ell > DEGREE_CAP {
            return Err(Error::Config(format!(
                "exponent bound {y} needs Taylor degree above {DEGREE_CAP}"
            )));
        }
    }
    Ok(ell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Exact,
    Sketched,
}

/// How the aggregate score `q̃` is formed from sketched scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QForm {
    /// `Σ_i w_i τ̃_i − 1`, an estimate of `⟨M(w) − Id, U⟩`.
    #[default]
    Weighted,
    /// `Σ_i (τ̃_i − 1)`, kept for comparison only.
    Unweighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub tau: Vec<f64>,
    pub q: Option<f64>,
    #[serde(rename = "oracle")]
    pub oracle_kind: OracleKind,
}

/// Sketch width and base polynomial degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SketchParams {
    pub r: usize,
    pub ell: usize,
    pub q_form: QForm,
}

impl SketchParams {
    /// `r = min(d, ⌈20·ln((n+1)/δ)⌉)`, `ℓ = max(10, ⌈2·ln(d+1)⌉)`.
    pub fn default_for(n: usize, d: usize, delta: f64) -> Self {
        let r = (20.0 * ((n as f64 + 1.0) / delta).ln()).ceil() as usize;
        let ell = (2.0 * ((d + 1) as f64).ln()).ceil() as usize;
        Self {
            r: r.clamp(1, d.max(1)),
            ell: ell.max(10),
            q_form: QForm::Weighted,
        }
    }
}

/// `A_{r,ℓ} = S · P_ℓ(½ α Σ_j M(w_j))` together with `tr(A Aᵀ)`.
///
/// A sketch at least as wide as the dimension is replaced by the identity,
/// which makes the oracle exact up to Taylor truncation.
#[derive(Debug, Clone)]
pub struct SketchedExponentialOracle {
    pub sketch: DMatrix<f64>,
    pub trace_estimate: f64,
    pub r: usize,
    pub ell: usize,
    pub seed: u64,
}

impl SketchedExponentialOracle {
    pub fn is_identity_sketch(&self) -> bool {
        self.sketch.nrows() == self.sketch.ncols() && self.r >= self.sketch.ncols()
    }
}

/// Draws an `r × d` matrix with i.i.d. `N(0, 1/r)` entries; row `k` comes
/// from its own ChaCha stream so rows are reproducible independently.
pub fn gaussian_sketch(r: usize, d: usize, seed: u64) -> DMatrix<f64> {
    let scale = 1.0 / (r as f64).sqrt();
    let mut s = DMatrix::zeros(r, d);
    for k in 0..r {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        for j in 0..d {
            s[(k, j)] = scale * rng.sample::<f64, _>(StandardNormal);
        }
    }
    s
}

/// Builds the sketched oracle. The effective degree is raised above
/// `params.ell` as needed for the history's exponent bound (see
/// [`taylor_degree_for`]).
pub fn build_sketched_oracle(
    data: &Dataset,
    history: &WeightHistory,
    params: &SketchParams,
    seed: u64,
) -> Result<SketchedExponentialOracle> {
    if params.r == 0 {
        return Err(Error::Config("sketch width r must be positive".into()));
    }
    let d = data.d();
    let ell = if history.is_empty() || history.alpha() == 0.0 {
        params.ell
    } else {
        taylor_degree_for(0.5 * history.exponent_bound(), params.ell)?
    };
    let start = if params.r >= d {
        DMatrix::identity(d, d)
    } else {
        gaussian_sketch(params.r, d, seed).transpose()
    };
    let transposed = if history.is_empty() || history.alpha() == 0.0 {
        start
    } else {
        let op = HistorySumOperator::new(data, history)?;
        let width = start.ncols();
        // Densifying costs one n·d² product; the implicit route costs 2·n·d·width per degree.
        if d < 2 * ell.max(1) * width {
            taylor_exp_block(&op.dense(), 0.5 * history.alpha(), ell, &start)
        } else {
            taylor_exp_block(&op, 0.5 * history.alpha(), ell, &start)
        }
    };
    let sketch = transposed.transpose();
    let trace_estimate = sketch.norm_squared();
    if !(trace_estimate.is_finite() && trace_estimate > 0.0) {
        return Err(Error::Config(format!(
            "sketch trace {trace_estimate} is not a positive finite number"
        )));
    }
    Ok(SketchedExponentialOracle {
        sketch,
        trace_estimate,
        r: params.r.min(d),
        ell,
        seed,
    })
}

/// `τ̃_i = ‖A (X_i − μ(w))‖² / tr(A Aᵀ)` and the aggregate `q̃`.
pub fn sketched_scores(
    oracle: &SketchedExponentialOracle,
    data: &Dataset,
    w_now: &WeightVector,
    q_form: QForm,
) -> Result<ScoreReport> {
    check_dim(data.d(), oracle.sketch.ncols())?;
    let mu = weighted_mean(data, w_now)?;
    let centered = data.centered_at(&mu)?;
    let projected = centered.matrix() * oracle.sketch.transpose();
    let tau: Vec<f64> = projected
        .row_iter()
        .map(|r| r.norm_squared() / oracle.trace_estimate)
        .collect();
    let q = match q_form {
        QForm::Weighted => {
            tau.iter()
                .zip(w_now.as_slice())
                .map(|(t, w)| t * w)
                .sum::<f64>()
                - 1.0
        }
        QForm::Unweighted => tau.iter().map(|t| t - 1.0).sum(),
    };
    Ok(ScoreReport {
        tau,
        q: Some(q),
        oracle_kind: OracleKind::Sketched,
    })
}

/// `exp(α Σ_j M(w_j)) / tr(·)` by symmetric eigendecomposition, with the top
/// eigenvalue subtracted before exponentiating.
pub fn exact_density(data: &Dataset, history: &WeightHistory) -> Result<DMatrix<f64>> {
    let d = data.d();
    if d > DENSE_LIMIT {
        return Err(Error::TooLarge {
            d,
            limit: DENSE_LIMIT,
        });
    }
    if history.is_empty() || history.alpha() == 0.0 {
        return Ok(DMatrix::identity(d, d) / d as f64);
    }
    let mut sum = HistorySumOperator::new(data, history)?.dense();
    sum *= history.alpha();
    Ok(density_from_symmetric(sum))
}

/// `exp(Y)/tr exp(Y)` for a symmetric `Y`.
pub fn density_from_symmetric(y: DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(y);
    let top = eig.eigenvalues.max();
    let weights = eig.eigenvalues.map(|l| (l - top).exp());
    let total = weights.sum();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= weights[j] / total;
    }
    let u = scaled * v.transpose();
    (&u + u.transpose()) * 0.5
}

/// Quadratic forms `(X_i − μ)ᵀ U (X_i − μ)` for every sample.
pub fn quadratic_scores(data: &Dataset, center: &DVector<f64>, u: &DMatrix<f64>) -> Result<Vec<f64>> {
    let centered = data.centered_at(center)?;
    let z = centered.matrix() * u;
    Ok(z.row_iter()
        .zip(centered.matrix().row_iter())
        .map(|(a, b)| a.dot(&b).max(0.0))
        .collect())
}

/// Exact scores and `q = ⟨M(w_now) − Id, U⟩`.
pub fn exact_scores(
    data: &Dataset,
    history: &WeightHistory,
    w_now: &WeightVector,
) -> Result<ScoreReport> {
    let u = exact_density(data, history)?;
    let mu = weighted_mean(data, w_now)?;
    let tau = quadratic_scores(data, &mu, &u)?;
    let mut m = dense_weighted_cov(data, w_now)?;
    for i in 0..m.nrows() {
        m[(i, i)] -= 1.0;
    }
    let q = m.component_mul(&u).sum();
    Ok(ScoreReport {
        tau,
        q: Some(q),
        oracle_kind: OracleKind::Exact,
    })
}
