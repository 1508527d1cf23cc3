use serde::{Deserialize, Serialize};

/// One epoch of an MMW filter run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// Spectral estimate at the start of the epoch.
    pub lambda0: f64,
    /// `λ_t` for every iteration that was started, beginning with `λ_0`.
    pub lambdas: Vec<f64>,
    /// Estimate after the last weight update; `None` for the final epoch.
    pub lambda_end: Option<f64>,
    pub alpha: Option<f64>,
    pub iterations: usize,
    pub filter_calls: usize,
    pub mass_removed: f64,
    pub wall_time_secs: f64,
}

/// Inputs and output of one 1D filter call, in the filter's index space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCall {
    pub epoch: usize,
    pub before: Vec<f64>,
    pub tau: Vec<f64>,
    pub after: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpochTrace {
    pub epochs: Vec<EpochRecord>,
    #[serde(skip)]
    pub calls: Vec<FilterCall>,
}

impl EpochTrace {
    /// Every spectral estimate in the order it was computed.
    pub fn lambda_history(&self) -> Vec<f64> {
        self.epochs
            .iter()
            .flat_map(|e| e.lambdas.iter().copied().chain(e.lambda_end))
            .collect()
    }

    pub fn total_mass_removed(&self) -> f64 {
        self.epochs.iter().map(|e| e.mass_removed).sum()
    }

    pub fn total_iterations(&self) -> usize {
        self.epochs.iter().map(|e| e.iterations).sum()
    }
}
