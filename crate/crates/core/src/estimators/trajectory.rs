use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Boem,
    BoemAvg,
    Oem,
    OemAvg,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Boem, Algorithm::BoemAvg, Algorithm::Oem, Algorithm::OemAvg];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Boem => "boem",
            Algorithm::BoemAvg => "boem-avg",
            Algorithm::Oem => "oem",
            Algorithm::OemAvg => "oem-avg",
        }
    }

    pub fn is_block(self) -> bool {
        matches!(self, Algorithm::Boem | Algorithm::BoemAvg)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {s:?} (boem, boem-avg, oem, oem-avg)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub n_obs: usize,
    pub values: Vec<f64>,
}

/// Parameter estimates in force after given observation counts.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorTrajectory {
    pub algorithm: Algorithm,
    pub param_names: Vec<String>,
    pub checkpoints: Vec<Checkpoint>,
}

impl EstimatorTrajectory {
    pub fn new(algorithm: Algorithm, param_names: Vec<String>) -> Self {
        Self {
            algorithm,
            param_names,
            checkpoints: Vec::new(),
        }
    }

    /// Appends a checkpoint; counts must strictly increase.
    pub(crate) fn record(&mut self, n_obs: usize, values: Vec<f64>) {
        debug_assert!(self.checkpoints.last().is_none_or(|c| c.n_obs < n_obs));
        self.checkpoints.push(Checkpoint { n_obs, values });
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|p| p == name)
    }

    /// `(n_obs, value)` pairs of one parameter.
    pub fn series(&self, name: &str) -> Option<Vec<(usize, f64)>> {
        let i = self.param_index(name)?;
        Some(self.checkpoints.iter().map(|c| (c.n_obs, c.values[i])).collect())
    }

    pub fn value_at(&self, n_obs: usize, name: &str) -> Option<f64> {
        let i = self.param_index(name)?;
        self.checkpoints.iter().find(|c| c.n_obs == n_obs).map(|c| c.values[i])
    }

    pub fn last(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }
}

/// Sorted, deduplicated positive checkpoints.
pub(crate) fn normalize_checkpoints(requested: &[usize]) -> Vec<usize> {
    let mut ck: Vec<usize> = requested.iter().copied().filter(|&k| k > 0).collect();
    ck.sort_unstable();
    ck.dedup();
    ck
}
