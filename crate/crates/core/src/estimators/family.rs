use std::fmt::Debug;

use super::mstep::{
    mstep_finite, mstep_finite_partial, mstep_lgssm, mstep_lgssm_partial, ParamBounds, FINITE_GROUPS, LGSSM_GROUPS,
};
use crate::error::Result;
use crate::models::{FiniteGaussianHmm, InitialDistribution, LgssmParams};
use crate::smoothing::{BlockStatistics, FiniteStatistic, LgssmStatistic};

/// A model family the block estimators can drive: exact block statistics
/// plus a closed-form M-step.
pub trait ModelFamily: BlockStatistics + Clone + Debug + Send + Sync {
    fn m_step(stat: &Self::Stat, bounds: &ParamBounds) -> Result<Self>;

    /// M-step with the named parameter groups held at their current values.
    fn m_step_fixed(&self, stat: &Self::Stat, bounds: &ParamBounds, fixed: &[String]) -> Result<Self>;

    /// Names accepted by [`ModelFamily::m_step_fixed`].
    fn param_groups() -> &'static [&'static str];

    fn param_names(&self) -> Vec<String>;

    fn param_values(&self) -> Vec<f64>;

    /// Default law of the state preceding the first observation.
    fn default_initial(&self) -> InitialDistribution;
}

impl ModelFamily for FiniteGaussianHmm {
    fn m_step(stat: &FiniteStatistic, bounds: &ParamBounds) -> Result<Self> {
        mstep_finite(stat, bounds)
    }

    fn m_step_fixed(&self, stat: &FiniteStatistic, bounds: &ParamBounds, fixed: &[String]) -> Result<Self> {
        mstep_finite_partial(stat, bounds, self, fixed)
    }

    fn param_groups() -> &'static [&'static str] {
        &FINITE_GROUPS
    }

    fn param_names(&self) -> Vec<String> {
        FiniteGaussianHmm::param_names(self.d())
    }

    fn param_values(&self) -> Vec<f64> {
        FiniteGaussianHmm::param_values(self)
    }

    /// Uniform over the states.
    fn default_initial(&self) -> InitialDistribution {
        InitialDistribution::uniform(self.d())
    }
}

impl ModelFamily for LgssmParams {
    fn m_step(stat: &LgssmStatistic, bounds: &ParamBounds) -> Result<Self> {
        mstep_lgssm(stat, bounds)
    }

    fn m_step_fixed(&self, stat: &LgssmStatistic, bounds: &ParamBounds, fixed: &[String]) -> Result<Self> {
        mstep_lgssm_partial(stat, bounds, self, fixed)
    }

    fn param_groups() -> &'static [&'static str] {
        &LGSSM_GROUPS
    }

    fn param_names(&self) -> Vec<String> {
        LgssmParams::param_names()
    }

    fn param_values(&self) -> Vec<f64> {
        LgssmParams::param_values(self)
    }

    /// Stationary law of the AR(1) state under these parameters.
    fn default_initial(&self) -> InitialDistribution {
        InitialDistribution::Gaussian {
            mean: 0.0,
            var: self.stationary_var(),
        }
    }
}
