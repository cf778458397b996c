//! Block online EM and its averaged variant.
//!
//! Block `n` holds the parameter fixed at `theta_{n-1}` while its
//! `tau_n` observations are smoothed, then sets `theta_n = M(S_{n-1})`.
//! The averaged estimator applies the M-step to the running mean
//! `Sigma_n = (1/T_n) sum_j tau_j S_{j-1}` instead; it only reads the plain
//! recursion and never feeds back into it.

use super::family::ModelFamily;
use super::mstep::ParamBounds;
use super::schedule::BlockSchedule;
use super::trajectory::{normalize_checkpoints, Algorithm, EstimatorTrajectory};
use crate::error::{Error, Result};
use crate::models::InitialDistribution;
use crate::smoothing::SufficientStatistic;

/// How each block's initial law is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChiPolicy {
    /// Start from the filter at the end of the previous block.
    #[default]
    WarmStart,
    /// Restart every block from the initial law of the first block.
    Reset,
}

impl std::str::FromStr for ChiPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "warm" => Ok(Self::WarmStart),
            "reset" => Ok(Self::Reset),
            _ => Err(Error::InvalidConfig(format!("unknown chi policy {s:?} (warm, reset)"))),
        }
    }
}

impl std::fmt::Display for ChiPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::WarmStart => "warm",
            Self::Reset => "reset",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoemOptions {
    pub averaged: bool,
    pub chi_policy: ChiPolicy,
    /// M-steps fire only once more than this many observations have been
    /// processed; earlier blocks still enter the running average.
    pub burn_in: usize,
    /// Parameter groups held at their initial value.
    pub fixed: Vec<String>,
    /// Observation counts to record. Empty records every block end.
    pub checkpoints: Vec<usize>,
    pub bounds: ParamBounds,
}

impl Default for BoemOptions {
    fn default() -> Self {
        Self {
            averaged: true,
            chi_policy: ChiPolicy::WarmStart,
            burn_in: 0,
            fixed: Vec::new(),
            checkpoints: Vec::new(),
            bounds: ParamBounds::default(),
        }
    }
}

/// `Sigma_n = (T_{n-1} Sigma_{n-1} + tau_n S) / T_n`; the first call returns `S`.
pub fn update_average<S: SufficientStatistic>(sigma: Option<&S>, t_prev: usize, s_new: &S, tau: usize) -> S {
    match sigma {
        None => s_new.clone(),
        Some(sigma) => {
            let mut out = sigma.clone();
            out.blend(s_new, tau as f64 / (t_prev + tau) as f64);
            out
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoemState<M: ModelFamily> {
    pub theta: M,
    /// `Sigma_n`; `None` before the first block.
    pub sigma: Option<M::Stat>,
    /// `M(Sigma_n)`, or `theta_0` before the first block.
    pub theta_avg: M,
    pub t_total: usize,
    pub n: usize,
    pub chi: InitialDistribution,
    chi0: InitialDistribution,
}

impl<M: ModelFamily> BoemState<M> {
    pub fn new(theta0: M, chi0: InitialDistribution) -> Result<Self> {
        chi0.validate()?;
        Ok(Self {
            theta_avg: theta0.clone(),
            theta: theta0,
            sigma: None,
            t_total: 0,
            n: 0,
            chi: chi0.clone(),
            chi0,
        })
    }

    /// Runs one block and the M-step(s) that close it.
    pub fn process_block(&mut self, block: &[f64], opts: &BoemOptions) -> Result<()> {
        let outcome = self.theta.block_stats(&self.chi, block)?;
        let sigma = opts
            .averaged
            .then(|| update_average(self.sigma.as_ref(), self.t_total, &outcome.stat, block.len()));
        if self.t_total + block.len() > opts.burn_in {
            let theta_next = self.theta.m_step_fixed(&outcome.stat, &opts.bounds, &opts.fixed)?;
            if let Some(sigma) = &sigma {
                self.theta_avg = self.theta_avg.m_step_fixed(sigma, &opts.bounds, &opts.fixed)?;
            }
            self.theta = theta_next;
        }
        if sigma.is_some() {
            self.sigma = sigma;
        }
        self.chi = match opts.chi_policy {
            ChiPolicy::WarmStart => outcome.terminal,
            ChiPolicy::Reset => self.chi0.clone(),
        };
        self.t_total += block.len();
        self.n += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoemOutput {
    pub plain: EstimatorTrajectory,
    pub averaged: Option<EstimatorTrajectory>,
    pub blocks: usize,
    pub observations_used: usize,
}

/// Runs block online EM over `observations`.
///
/// With `n_blocks = Some(n)` exactly `n` blocks are processed and the stream
/// must hold `T_n` observations. With `None`, blocks run while they fit in the
/// stream. A checkpoint `k` records the estimate in force after `k`
/// observations, i.e. `theta_n` with `T_n <= k < T_{n+1}`; checkpoints beyond
/// the processed horizon are dropped. Observation count 0 always records
/// the initial value.
pub fn boem_run<M: ModelFamily>(
    theta0: &M,
    chi0: &InitialDistribution,
    schedule: &BlockSchedule,
    observations: &[f64],
    n_blocks: Option<usize>,
    opts: &BoemOptions,
) -> Result<BoemOutput> {
    let (n_blocks, horizon) = match n_blocks {
        Some(n) => {
            let needed = if n == 0 { 0 } else { schedule.schedule_block(n)?.1 };
            if needed > observations.len() {
                return Err(Error::StreamExhausted {
                    needed,
                    available: observations.len(),
                });
            }
            (n, needed)
        }
        None => (schedule.blocks_within(observations.len()), observations.len()),
    };
    let blocks: Vec<_> = schedule.blocks().take(n_blocks).collect();
    let checkpoints: Vec<usize> = if opts.checkpoints.is_empty() {
        blocks.iter().map(|b| b.end).collect()
    } else {
        normalize_checkpoints(&opts.checkpoints)
            .into_iter()
            .filter(|&k| k <= horizon)
            .collect()
    };

    let names = theta0.param_names();
    let mut plain = EstimatorTrajectory::new(Algorithm::Boem, names.clone());
    let mut averaged = opts.averaged.then(|| EstimatorTrajectory::new(Algorithm::BoemAvg, names));
    let mut state = BoemState::new(theta0.clone(), chi0.clone())?;

    let record = |state: &BoemState<M>, k: usize, plain: &mut EstimatorTrajectory, avg: &mut Option<EstimatorTrajectory>| {
        plain.record(k, state.theta.param_values());
        if let Some(avg) = avg {
            avg.record(k, state.theta_avg.param_values());
        }
    };
    record(&state, 0, &mut plain, &mut averaged);

    let mut next_ck = 0;
    for block in &blocks {
        // Checkpoints falling before this block's end see the current estimate.
        while next_ck < checkpoints.len() && checkpoints[next_ck] < block.end {
            record(&state, checkpoints[next_ck], &mut plain, &mut averaged);
            next_ck += 1;
        }
        state.process_block(&observations[block.start..block.end], opts)?;
    }
    for &k in &checkpoints[next_ck..] {
        record(&state, k, &mut plain, &mut averaged);
    }

    Ok(BoemOutput {
        plain,
        averaged,
        blocks: state.n,
        observations_used: state.t_total,
    })
}
