//! Per-observation online EM for the finite model, with Polyak-Ruppert
//! averaging of the parameter iterates.
//!
//! The smoother recursion is the block one with `1/t` replaced by
//! `gamma_t = t^{-exponent}`; after a burn-in the M-step is applied to the
//! running statistic after every observation.

use super::mstep::{mstep_finite_partial, ParamBounds};
use super::trajectory::{normalize_checkpoints, Algorithm, EstimatorTrajectory};
use crate::error::{Error, Result};
use crate::models::{FiniteGaussianHmm, InitialDistribution};
use crate::smoothing::{FiniteStatFunctional, FiniteStatistic, ForwardSmoother};

pub const DEFAULT_BURN_IN: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct OemOptions {
    /// `gamma_t = t^{-gamma_exponent}`, exponent in (0.5, 1].
    pub gamma_exponent: f64,
    /// Observations accumulated before the first M-step.
    pub burn_in: usize,
    /// Parameter averaging covers iterates `t > avg_start`.
    pub avg_start: usize,
    /// Parameter groups held at their initial value.
    pub fixed: Vec<String>,
    pub checkpoints: Vec<usize>,
    pub bounds: ParamBounds,
}

impl OemOptions {
    /// Averaging starts after 10% of the planned budget.
    pub fn for_budget(gamma_exponent: f64, budget: usize) -> Self {
        Self {
            gamma_exponent,
            burn_in: DEFAULT_BURN_IN,
            avg_start: budget / 10,
            fixed: Vec::new(),
            checkpoints: Vec::new(),
            bounds: ParamBounds::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma_exponent > 0.5 && self.gamma_exponent <= 1.0) {
            return Err(Error::InvalidStepSize(self.gamma_exponent));
        }
        if self.burn_in < 1 {
            return Err(Error::InvalidConfig("burn-in must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OemState {
    pub theta: FiniteGaussianHmm,
    smoother: ForwardSmoother<FiniteStatFunctional>,
    pub gamma_exponent: f64,
    pub burn_in: usize,
    pub t: usize,
    pub n0: usize,
    fixed: Vec<String>,
    avg_sum: Vec<f64>,
    avg_count: usize,
    bounds: ParamBounds,
}

impl OemState {
    pub fn new(theta0: FiniteGaussianHmm, chi0: &InitialDistribution, opts: &OemOptions) -> Result<Self> {
        opts.validate()?;
        let d = theta0.d();
        Ok(Self {
            smoother: ForwardSmoother::new(FiniteStatFunctional { d }, chi0, d)?,
            avg_sum: vec![0.0; theta0.param_values().len()],
            theta: theta0,
            gamma_exponent: opts.gamma_exponent,
            burn_in: opts.burn_in,
            t: 0,
            n0: opts.avg_start,
            fixed: opts.fixed.clone(),
            avg_count: 0,
            bounds: opts.bounds,
        })
    }

    pub fn step_size(&self, t: usize) -> f64 {
        (t as f64).powf(-self.gamma_exponent)
    }

    pub fn observe(&mut self, y: f64) -> Result<()> {
        let t = self.t + 1;
        self.smoother.step(&self.theta, y, self.step_size(t))?;
        self.t = t;
        if t > self.burn_in {
            let stat = FiniteStatistic::from_flat(self.theta.d(), self.smoother.statistic())?;
            self.theta = mstep_finite_partial(&stat, &self.bounds, &self.theta, &self.fixed)?;
        }
        if t > self.n0 {
            for (acc, v) in self.avg_sum.iter_mut().zip(self.theta.param_values()) {
                *acc += v;
            }
            self.avg_count += 1;
        }
        Ok(())
    }

    /// Current statistic `sum_x rho_t(x) phi_t(x)`.
    pub fn statistic(&self) -> Result<FiniteStatistic> {
        FiniteStatistic::from_flat(self.theta.d(), self.smoother.statistic())
    }

    /// Running mean of the iterates after `n0`; the current iterate before that.
    pub fn averaged_values(&self) -> Vec<f64> {
        if self.avg_count == 0 {
            self.theta.param_values()
        } else {
            self.avg_sum.iter().map(|s| s / self.avg_count as f64).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OemOutput {
    pub plain: EstimatorTrajectory,
    pub averaged: EstimatorTrajectory,
}

/// Runs online EM over the first `n_obs` observations (all when `None`).
/// Empty checkpoint lists record only the start and the end.
pub fn oem_run(
    theta0: &FiniteGaussianHmm,
    chi0: &InitialDistribution,
    observations: &[f64],
    n_obs: Option<usize>,
    opts: &OemOptions,
) -> Result<OemOutput> {
    let n = n_obs.unwrap_or(observations.len());
    if n > observations.len() {
        return Err(Error::StreamExhausted {
            needed: n,
            available: observations.len(),
        });
    }
    let mut checkpoints = normalize_checkpoints(&opts.checkpoints);
    checkpoints.retain(|&k| k <= n);
    if opts.checkpoints.is_empty() && n > 0 {
        checkpoints.push(n);
    }

    let names = FiniteGaussianHmm::param_names(theta0.d());
    let mut plain = EstimatorTrajectory::new(Algorithm::Oem, names.clone());
    let mut averaged = EstimatorTrajectory::new(Algorithm::OemAvg, names);
    let mut state = OemState::new(theta0.clone(), chi0, opts)?;
    plain.record(0, state.theta.param_values());
    averaged.record(0, state.averaged_values());

    let mut next_ck = 0;
    for &y in &observations[..n] {
        state.observe(y)?;
        if next_ck < checkpoints.len() && checkpoints[next_ck] == state.t {
            plain.record(state.t, state.theta.param_values());
            averaged.record(state.t, state.averaged_values());
            next_ck += 1;
        }
    }
    Ok(OemOutput { plain, averaged })
}
