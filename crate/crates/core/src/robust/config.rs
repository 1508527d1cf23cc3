use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matexp::{OracleKind, QForm, SketchParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    BoundedCov,
    Subgaussian,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::BoundedCov => "bounded_cov",
            Mode::Subgaussian => "subgaussian",
        }
    }
}

/// Every tunable of the estimators. `None` fields are filled from the
/// concentration-based defaults at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub eps: f64,
    pub delta: f64,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub mode: Mode,
    pub oracle: OracleKind,
    pub r: Option<usize>,
    pub ell: Option<usize>,
    pub epoch_cap: Option<usize>,
    pub iter_cap: Option<usize>,
    /// Multiplier `C` on `ξ` in the sub-Gaussian stopping rule.
    pub xi_scale: f64,
    /// Constant on the `ε·ln(1/ε)` term of `ξ`.
    pub xi_log_constant: f64,
    pub q_form: QForm,
    pub seed: u64,
    /// Keep a copy of every filter call's inputs and outputs in the trace.
    #[serde(default)]
    pub record_filter_calls: bool,
}

impl EstimatorConfig {
    pub fn new(eps: f64, mode: Mode) -> Self {
        Self {
            eps,
            delta: 0.1,
            gamma1: None,
            gamma2: None,
            mode,
            oracle: OracleKind::Sketched,
            r: None,
            ell: None,
            epoch_cap: None,
            iter_cap: None,
            xi_scale: 1.0,
            xi_log_constant: 4.0,
            q_form: QForm::Weighted,
            seed: 0,
            record_filter_calls: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::InvalidEpsilon(self.eps));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta {} not in (0, 1)", self.delta)));
        }
        for (name, cap) in [("epoch_cap", self.epoch_cap), ("iter_cap", self.iter_cap)] {
            if cap == Some(0) {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if let Some(g) = self.gamma2 {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::Config(format!("gamma2 {g} must be positive")));
            }
        }
        if let Some(g) = self.gamma1 {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::Config(format!("gamma1 {g} must be nonnegative")));
            }
        }
        if self.r == Some(0) {
            return Err(Error::Config("sketch width r must be positive".into()));
        }
        if !(self.xi_scale > 0.0 && self.xi_log_constant >= 0.0) {
            return Err(Error::Config("xi constants must be positive".into()));
        }
        Ok(())
    }
}

/// Thresholds and caps after defaults are applied for a concrete `(n, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub gamma1: f64,
    pub gamma2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Sub-Gaussian spectral threshold `ξ` (unused in bounded-covariance mode).
    pub xi: f64,
    pub kappa: f64,
    pub epoch_cap: usize,
    pub iter_cap: usize,
    /// Failure budget for each randomized call (power method, sketch).
    pub call_delta: f64,
    pub sketch: SketchParams,
}

/// `⌈log_{3/2}(max(κ², 2)·n)⌉ + 4`.
pub fn default_epoch_cap(kappa: f64, n: usize) -> usize {
    let arg = (kappa * kappa).max(2.0) * n as f64;
    (arg.ln() / 1.5f64.ln()).ceil() as usize + 4
}

/// `⌈20·log₂(d+2)⌉ + 4`.
pub fn default_iter_cap(d: usize) -> usize {
    (20.0 * ((d + 2) as f64).log2()).ceil() as usize + 4
}

/// `(γ₁, γ₂)` for bounded second moments.
pub fn bounded_cov_gammas(n: usize, d: usize, eps: f64, delta: f64) -> (f64, f64) {
    let (n, d) = (n as f64, d as f64);
    let g1 = (2.0 * d / (n * delta)).sqrt() + (eps / std::f64::consts::E.powi(2)).sqrt();
    let g2 = (d * (d.ln() + (2.0 / delta).ln()) / (0.1 * eps * n)).max(1.0);
    (g1, g2)
}

/// `(γ₁, γ₂, β₁, β₂)` for isotropic sub-Gaussian inliers.
pub fn subgaussian_params(n: usize, d: usize, eps: f64, delta: f64) -> (f64, f64, f64, f64) {
    let a = (d as f64 + (1.0 / delta).ln()) / n as f64;
    let g1 = 2.0 * a.sqrt();
    let g2 = 2.0 * a.sqrt().max(a);
    let beta2 = 4.0 * (1.0 / eps).ln() + a / eps;
    (g1, g2, beta2.sqrt(), beta2)
}

/// `ξ = γ₂ + 2γ₁² + 4ε²β₁² + 2εβ₂ + c·ε·ln(1/ε)`.
pub fn xi(eps: f64, g1: f64, g2: f64, b1: f64, b2: f64, c: f64) -> f64 {
    g2 + 2.0 * g1 * g1 + 4.0 * eps * eps * b1 * b1 + 2.0 * eps * b2 + c * eps * (1.0 / eps).ln()
}

impl EstimatorConfig {
    /// Applies defaults for data of shape `n × d` whose samples lie within
    /// distance `kappa` of the origin.
    pub fn resolve(&self, n: usize, d: usize, kappa: f64) -> Result<Resolved> {
        self.validate()?;
        let (g1, g2, b1, b2) = match self.mode {
            Mode::BoundedCov => {
                let (g1, g2) = bounded_cov_gammas(n, d, self.eps, self.delta);
                (g1, g2, 0.0, 0.0)
            }
            Mode::Subgaussian => subgaussian_params(n, d, self.eps, self.delta),
        };
        let gamma1 = self.gamma1.unwrap_or(g1);
        let gamma2 = self.gamma2.unwrap_or(g2);
        let xi = match self.mode {
            Mode::BoundedCov => 0.0,
            Mode::Subgaussian => xi(self.eps, gamma1, gamma2, b1, b2, self.xi_log_constant),
        };
        let epoch_cap = self.epoch_cap.unwrap_or_else(|| default_epoch_cap(kappa, n));
        let iter_cap = self.iter_cap.unwrap_or_else(|| default_iter_cap(d));
        let call_delta = self.delta / (epoch_cap * iter_cap) as f64;
        let mut sketch = SketchParams::default_for(n, d, call_delta);
        if let Some(r) = self.r {
            sketch.r = r;
        }
        if let Some(ell) = self.ell {
            sketch.ell = ell;
        }
        sketch.q_form = self.q_form;
        Ok(Resolved {
            gamma1,
            gamma2,
            beta1: b1,
            beta2: b2,
            xi,
            kappa,
            epoch_cap,
            iter_cap,
            call_delta,
            sketch,
        })
    }
}
