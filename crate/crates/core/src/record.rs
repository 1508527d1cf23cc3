//! Serializable record of one experiment run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Configuration snapshot, seed, named metrics and per-phase wall times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: serde_json::Value,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    pub timings: BTreeMap<String, f64>,
}

impl RunRecord {
    pub fn new<C: Serialize>(config: &C, seed: u64) -> Result<Self> {
        Ok(Self {
            config: serde_json::to_value(config).map_err(|e| Error::Parse(e.to_string()))?,
            seed,
            metrics: BTreeMap::new(),
            timings: BTreeMap::new(),
        })
    }

    pub fn with_metric(mut self, name: impl Into<String>, value: f64) -> Self {
        self.metrics.insert(name.into(), value);
        self
    }

    pub fn with_timing(mut self, phase: impl Into<String>, secs: f64) -> Self {
        self.timings.insert(phase.into(), secs);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
