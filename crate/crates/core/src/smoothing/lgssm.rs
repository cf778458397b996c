//! Kalman filter plus fixed-interval (Rauch-Tung-Striebel) smoother over one block.
//!
//! Index 0 is the pre-block state drawn from the initial law; observations
//! `y_1..y_tau` attach to states `1..tau`.

use std::f64::consts::PI;

use super::stats::{BlockOutcome, BlockStatistics, LgssmStatistic};
use crate::error::{Error, Result};
use crate::models::{InitialDistribution, LgssmParams};

/// Smoothed marginals `E[X_t | Y]`, `Var[X_t | Y]` for `t = 0..=tau` and
/// lag-one covariances `Cov[X_{t-1}, X_t | Y]` for `t = 1..=tau` (stored at `t - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedMoments {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    pub cross_cov: Vec<f64>,
    pub filtered_mean: f64,
    pub filtered_var: f64,
    pub log_likelihood: f64,
}

pub fn smooth_lgssm(theta: &LgssmParams, chi: &InitialDistribution, block: &[f64]) -> Result<SmoothedMoments> {
    if block.is_empty() {
        return Err(Error::EmptyBlock);
    }
    chi.validate()?;
    let (m0, p0) = chi.expect_gaussian()?;
    let (phi, q, r) = (theta.phi(), theta.var_u(), theta.var_v());
    let tau = block.len();

    let mut filt_m = Vec::with_capacity(tau + 1);
    let mut filt_p = Vec::with_capacity(tau + 1);
    let mut pred_m = Vec::with_capacity(tau);
    let mut pred_p = Vec::with_capacity(tau);
    filt_m.push(m0);
    filt_p.push(p0);
    let mut log_likelihood = 0.0;
    for (t, &y) in block.iter().enumerate() {
        let mp = phi * filt_m[t];
        let pp = phi * phi * filt_p[t] + q;
        let s = pp + r;
        let gain = pp / s;
        let innov = y - mp;
        log_likelihood -= 0.5 * ((2.0 * PI * s).ln() + innov * innov / s);
        pred_m.push(mp);
        pred_p.push(pp);
        filt_m.push(mp + gain * innov);
        filt_p.push((1.0 - gain) * pp);
    }

    let mut mean = filt_m.clone();
    let mut var = filt_p.clone();
    let mut cross_cov = vec![0.0; tau];
    for t in (1..=tau).rev() {
        // Smoother gain for the transition (t-1) -> t.
        let j = filt_p[t - 1] * phi / pred_p[t - 1];
        mean[t - 1] = filt_m[t - 1] + j * (mean[t] - pred_m[t - 1]);
        var[t - 1] = filt_p[t - 1] + j * j * (var[t] - pred_p[t - 1]);
        cross_cov[t - 1] = j * var[t];
    }

    Ok(SmoothedMoments {
        filtered_mean: filt_m[tau],
        filtered_var: filt_p[tau],
        mean,
        var,
        cross_cov,
        log_likelihood,
    })
}

/// Averages the smoothed second moments over the block.
pub(crate) fn average_moments(mean: &[f64], var: &[f64], cross: &[f64], block: &[f64]) -> LgssmStatistic {
    let tau = block.len();
    let (mut prev2, mut cross_m, mut cur2, mut xy, mut y2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for t in 1..=tau {
        let y = block[t - 1];
        prev2 += var[t - 1] + mean[t - 1] * mean[t - 1];
        cross_m += cross[t - 1] + mean[t - 1] * mean[t];
        cur2 += var[t] + mean[t] * mean[t];
        xy += y * mean[t];
        y2 += y * y;
    }
    let n = tau as f64;
    LgssmStatistic::new(prev2 / n, cross_m / n, cur2 / n, xy / n, y2 / n)
}

/// Block statistic of the linear Gaussian model via forward filtering and
/// backward smoothing. Memory is `O(tau)`.
pub fn block_stats_lgssm(
    theta: &LgssmParams,
    chi: &InitialDistribution,
    block: &[f64],
) -> Result<BlockOutcome<LgssmStatistic>> {
    let sm = smooth_lgssm(theta, chi, block)?;
    Ok(BlockOutcome {
        stat: average_moments(&sm.mean, &sm.var, &sm.cross_cov, block),
        terminal: InitialDistribution::Gaussian {
            mean: sm.filtered_mean,
            var: sm.filtered_var,
        },
        log_likelihood: sm.log_likelihood,
    })
}

impl BlockStatistics for LgssmParams {
    type Stat = LgssmStatistic;

    fn block_stats(&self, chi: &InitialDistribution, block: &[f64]) -> Result<BlockOutcome<LgssmStatistic>> {
        block_stats_lgssm(self, chi, block)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn noiseless_observations_pin_the_state() {
        let theta = LgssmParams::new(0.7, 1.0, 1e-8).unwrap();
        let chi = InitialDistribution::gaussian(0.0, 2.0).unwrap();
        let ys = [0.4, -1.2, 2.0, 0.3, 0.9];
        let sm = smooth_lgssm(&theta, &chi, &ys).unwrap();
        for t in 1..=ys.len() {
            assert_relative_eq!(sm.mean[t], ys[t - 1], epsilon = 1e-6);
        }
        let stat = block_stats_lgssm(&theta, &chi, &ys).unwrap().stat;
        let mean_y2 = ys.iter().map(|y| y * y).sum::<f64>() / ys.len() as f64;
        assert_relative_eq!(stat.m_cur2(), mean_y2, epsilon = 1e-6);
    }

    #[test]
    fn white_state_posterior_is_half_the_observation() {
        // phi = 0: each X_t ~ N(0, 1) independent, Y_t = X_t + N(0, 1),
        // so E[X_t | Y] = Y_t / 2 exactly.
        let theta = LgssmParams::new(0.0, 1.0, 1.0).unwrap();
        let chi = InitialDistribution::gaussian(3.0, 5.0).unwrap();
        let ys = [1.0, -2.0, 0.5, 4.0];
        let sm = smooth_lgssm(&theta, &chi, &ys).unwrap();
        for t in 1..=ys.len() {
            assert_relative_eq!(sm.mean[t], ys[t - 1] / 2.0, epsilon = 1e-14);
            assert_relative_eq!(sm.var[t], 0.5, epsilon = 1e-14);
        }
        assert!(sm.cross_cov.iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_inputs() {
        let theta = LgssmParams::new(0.5, 1.0, 1.0).unwrap();
        let chi = InitialDistribution::gaussian(0.0, 1.0).unwrap();
        assert_eq!(block_stats_lgssm(&theta, &chi, &[]).unwrap_err(), Error::EmptyBlock);
        assert!(matches!(
            block_stats_lgssm(&theta, &InitialDistribution::uniform(2), &[1.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
