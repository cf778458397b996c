//! Brute-force references for the block statistics.
//!
//! These evaluate the smoothing expectations straight from their definition
//! (explicit path sums for the finite model, dense Gaussian conditioning for
//! the linear model) and share no code with the recursive implementations.

use nalgebra::{DMatrix, DVector};

use super::stats::{FiniteStatistic, LgssmStatistic};
use crate::error::{Error, Result};
use crate::models::{FiniteGaussianHmm, InitialDistribution, LgssmParams};

/// Largest `d^tau` the path enumeration accepts.
pub const MAX_PATHS: f64 = 1e6;
/// Longest block the dense Gaussian oracle accepts.
pub const MAX_DENSE_BLOCK: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome<S> {
    pub stat: S,
    pub log_likelihood: f64,
}

/// Enumerates all `d^(tau+1)` paths `x_0..x_tau` with `x_0 ~ chi`, weights
/// each by `chi(x_0) prod_t m(x_{t-1}, x_t) g(x_t, y_t)` and averages the
/// per-path block statistic.
pub fn block_stats_finite_oracle(
    theta: &FiniteGaussianHmm,
    chi: &InitialDistribution,
    block: &[f64],
) -> Result<OracleOutcome<FiniteStatistic>> {
    if block.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let d = theta.d();
    let tau = block.len();
    if (d as f64).powi(tau as i32) > MAX_PATHS {
        return Err(Error::TooLarge(format!("{d}^{tau} paths exceeds {MAX_PATHS}")));
    }
    chi.validate()?;
    let chi = chi.expect_discrete(d)?;

    let dens: Vec<Vec<f64>> = block
        .iter()
        .map(|&y| {
            theta
                .states()
                .iter()
                .map(|&x| (-(y - x).powi(2) / (2.0 * theta.var())).exp() / (2.0 * std::f64::consts::PI * theta.var()).sqrt())
                .collect()
        })
        .collect();

    let mut s0 = vec![0.0; d];
    let mut s1 = vec![0.0; d];
    let mut s2 = vec![0.0; d];
    let mut spair = vec![0.0; d * d];
    let mut total = 0.0;
    let mut path = vec![0usize; tau + 1];
    loop {
        let mut w = chi[path[0]];
        for t in 1..=tau {
            w *= theta.trans(path[t - 1], path[t]) * dens[t - 1][path[t]];
        }
        if w > 0.0 {
            total += w;
            for t in 1..=tau {
                let (prev, cur, y) = (path[t - 1], path[t], block[t - 1]);
                s0[cur] += w;
                s1[cur] += w * y;
                s2[cur] += w * y * y;
                spair[prev * d + cur] += w;
            }
        }
        // Mixed-radix increment over the path.
        let mut k = 0;
        loop {
            if k > tau {
                let norm = total * tau as f64;
                if !(total > 0.0) {
                    return Err(Error::DegenerateLikelihood { step: tau });
                }
                for v in s0.iter_mut().chain(&mut s1).chain(&mut s2).chain(&mut spair) {
                    *v /= norm;
                }
                return Ok(OracleOutcome {
                    stat: FiniteStatistic::from_parts(&s0, &s1, &s2, &spair)?,
                    log_likelihood: total.ln(),
                });
            }
            path[k] += 1;
            if path[k] < d {
                break;
            }
            path[k] = 0;
            k += 1;
        }
    }
}

/// Exact posterior of `(X_0, .., X_tau)` given the block, by conditioning the
/// joint Gaussian. Returns the mean, covariance and `log p(Y)`.
pub fn lgssm_block_posterior(
    theta: &LgssmParams,
    chi: &InitialDistribution,
    block: &[f64],
) -> Result<(DVector<f64>, DMatrix<f64>, f64)> {
    if block.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let tau = block.len();
    if tau > MAX_DENSE_BLOCK {
        return Err(Error::TooLarge(format!("block of {tau} exceeds {MAX_DENSE_BLOCK}")));
    }
    chi.validate()?;
    let (m0, p0) = chi.expect_gaussian()?;
    let (phi, q, r) = (theta.phi(), theta.var_u(), theta.var_v());
    let n = tau + 1;

    // Prior: mean phi^t m0, Var X_t = phi^2 Var X_{t-1} + q, Cov(X_s, X_t) = phi^(t-s) Var X_s.
    let mut prior_var = vec![p0; n];
    for t in 1..n {
        prior_var[t] = phi * phi * prior_var[t - 1] + q;
    }
    let prior_mean = DVector::from_fn(n, |t, _| phi.powi(t as i32) * m0);
    let cov = DMatrix::from_fn(n, n, |s, t| {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        phi.powi((hi - lo) as i32) * prior_var[lo]
    });

    // Y = H X + noise with H selecting states 1..=tau.
    let c_xy = cov.columns(1, tau).into_owned();
    let mut c_yy = cov.view((1, 1), (tau, tau)).into_owned();
    for i in 0..tau {
        c_yy[(i, i)] += r;
    }
    let chol = c_yy
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DegenerateLikelihood { step: tau })?;
    let y = DVector::from_column_slice(block);
    let resid = &y - prior_mean.rows(1, tau);
    let post_mean = &prior_mean + &c_xy * chol.solve(&resid);
    let post_cov = &cov - &c_xy * chol.solve(&c_xy.transpose());

    let log_det: f64 = chol.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
    let quad = resid.dot(&chol.solve(&resid));
    let log_likelihood = -0.5 * (tau as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + quad);
    Ok((post_mean, post_cov, log_likelihood))
}

/// Block statistic of the linear model from the dense posterior.
pub fn block_stats_lgssm_oracle(
    theta: &LgssmParams,
    chi: &InitialDistribution,
    block: &[f64],
) -> Result<OracleOutcome<LgssmStatistic>> {
    let (mean, cov, log_likelihood) = lgssm_block_posterior(theta, chi, block)?;
    let tau = block.len();
    let second = |s: usize, t: usize| cov[(s, t)] + mean[s] * mean[t];
    let (mut prev2, mut cross, mut cur2, mut xy, mut y2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for t in 1..=tau {
        let y = block[t - 1];
        prev2 += second(t - 1, t - 1);
        cross += second(t - 1, t);
        cur2 += second(t, t);
        xy += y * mean[t];
        y2 += y * y;
    }
    let n = tau as f64;
    Ok(OracleOutcome {
        stat: LgssmStatistic::new(prev2 / n, cross / n, cur2 / n, xy / n, y2 / n),
        log_likelihood,
    })
}
