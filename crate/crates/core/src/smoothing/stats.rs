use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::models::InitialDistribution;

/// Tolerance on the unit mass of the indicator statistics.
pub const MASS_TOL: f64 = 1e-10;
/// Slack on the averaged Cauchy-Schwarz bound for the linear Gaussian moments.
pub const CAUCHY_SCHWARZ_SLACK: f64 = 1e-9;

/// A point of the convex set of expected sufficient statistics.
///
/// The flat view lets the estimators form weighted averages without knowing
/// the layout; any convex combination of valid statistics is valid.
pub trait SufficientStatistic: Clone + Debug + PartialEq + Send + Sync {
    fn as_slice(&self) -> &[f64];
    fn as_mut_slice(&mut self) -> &mut [f64];
    fn validate(&self) -> Result<()>;

    /// `(1 - w) * self + w * other`, in place.
    fn blend(&mut self, other: &Self, w: f64) {
        for (a, b) in self.as_mut_slice().iter_mut().zip(other.as_slice()) {
            *a = (1.0 - w) * *a + w * b;
        }
    }
}

/// Expected statistics of the finite Gaussian HMM, averaged over a block.
///
/// Flat layout: `s0[d] | s1[d] | s2[d] | spair[d*d]` where for the pair
/// `(X_{t-1}, X_t) = (i', i)` and observation `y`:
/// `s0_i = 1{X_t = i}`, `s1_i = y 1{X_t = i}`, `s2_i = y^2 1{X_t = i}`,
/// `spair_{i',i} = 1{X_{t-1} = i', X_t = i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteStatistic {
    d: usize,
    values: Vec<f64>,
}

impl FiniteStatistic {
    pub fn dim(d: usize) -> usize {
        3 * d + d * d
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            values: vec![0.0; Self::dim(d)],
        }
    }

    pub fn from_flat(d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != Self::dim(d) {
            return Err(Error::DimensionMismatch(format!(
                "finite statistic for d={d} needs {} values, got {}",
                Self::dim(d),
                values.len()
            )));
        }
        Ok(Self { d, values })
    }

    pub fn from_parts(s0: &[f64], s1: &[f64], s2: &[f64], spair: &[f64]) -> Result<Self> {
        let d = s0.len();
        if s1.len() != d || s2.len() != d || spair.len() != d * d {
            return Err(Error::DimensionMismatch("inconsistent statistic parts".into()));
        }
        let mut values = Vec::with_capacity(Self::dim(d));
        values.extend_from_slice(s0);
        values.extend_from_slice(s1);
        values.extend_from_slice(s2);
        values.extend_from_slice(spair);
        Ok(Self { d, values })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s0(&self) -> &[f64] {
        &self.values[..self.d]
    }

    pub fn s1(&self) -> &[f64] {
        &self.values[self.d..2 * self.d]
    }

    pub fn s2(&self) -> &[f64] {
        &self.values[2 * self.d..3 * self.d]
    }

    /// Row-major `d x d`, rows indexed by the previous state.
    pub fn spair(&self) -> &[f64] {
        &self.values[3 * self.d..]
    }

    pub fn spair_at(&self, prev: usize, cur: usize) -> f64 {
        self.values[3 * self.d + prev * self.d + cur]
    }
}

impl SufficientStatistic for FiniteStatistic {
    fn as_slice(&self) -> &[f64] {
        &self.values
    }

    fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStatistic("non-finite entry".into()));
        }
        let mass0: f64 = self.s0().iter().sum();
        let mass_pair: f64 = self.spair().iter().sum();
        if (mass0 - 1.0).abs() > MASS_TOL || (mass_pair - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidStatistic(format!(
                "indicator masses must be 1 (occupancy {mass0}, pairs {mass_pair})"
            )));
        }
        if self.s0().iter().chain(self.spair()).chain(self.s2()).any(|&v| v < 0.0) {
            return Err(Error::InvalidStatistic("negative indicator or second moment".into()));
        }
        Ok(())
    }
}

/// Block averages of `E[X_{t-1}^2]`, `E[X_{t-1} X_t]`, `E[X_t^2]`,
/// `Y_t E[X_t]` and `Y_t^2` under the smoothing law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgssmStatistic {
    values: [f64; 5],
}

impl LgssmStatistic {
    pub fn new(m_prev2: f64, m_cross: f64, m_cur2: f64, m_xy: f64, m_y2: f64) -> Self {
        Self {
            values: [m_prev2, m_cross, m_cur2, m_xy, m_y2],
        }
    }

    pub fn m_prev2(&self) -> f64 {
        self.values[0]
    }

    pub fn m_cross(&self) -> f64 {
        self.values[1]
    }

    pub fn m_cur2(&self) -> f64 {
        self.values[2]
    }

    pub fn m_xy(&self) -> f64 {
        self.values[3]
    }

    pub fn m_y2(&self) -> f64 {
        self.values[4]
    }
}

impl SufficientStatistic for LgssmStatistic {
    fn as_slice(&self) -> &[f64] {
        &self.values
    }

    fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStatistic("non-finite moment".into()));
        }
        if self.m_prev2() < 0.0 || self.m_cur2() < 0.0 || self.m_y2() < 0.0 {
            return Err(Error::InvalidStatistic("negative second moment".into()));
        }
        let cs = self.m_cross().powi(2) - self.m_prev2() * self.m_cur2();
        if cs > CAUCHY_SCHWARZ_SLACK {
            return Err(Error::InvalidStatistic(format!(
                "cross moment violates Cauchy-Schwarz by {cs:e}"
            )));
        }
        Ok(())
    }
}

/// Result of smoothing one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOutcome<S> {
    pub stat: S,
    /// Filtering law of the last hidden state of the block; warm-starts the next block.
    pub terminal: InitialDistribution,
    /// `log p(Y_block)` with the pre-block state drawn from the initial law.
    pub log_likelihood: f64,
}

/// Models whose block statistic can be computed exactly.
pub trait BlockStatistics {
    type Stat: SufficientStatistic;

    fn block_stats(&self, chi: &InitialDistribution, block: &[f64]) -> Result<BlockOutcome<Self::Stat>>;
}
