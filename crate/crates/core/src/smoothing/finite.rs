//! Forward-only smoothing of additive functionals on a finite state space.
//!
//! One pass over the block carries the normalized filter `phi_t`, the
//! backward (retrospective) kernel `r_t(x, x') = P(X_{t-1} = x' | X_t = x, Y_{1:t-1})`
//! and, per current state `x`, the running conditional expectation
//! `rho_t(x) = E[(1/t) sum_{s<=t} S(X_{s-1}, X_s, Y_s) | X_t = x, Y_{1:t}]`:
//!
//! ```text
//! rho_t(x) = sum_{x'} [ g_t S(x', x, Y_t) + (1 - g_t) rho_{t-1}(x') ] r_t(x, x')
//! ```
//!
//! with `g_t = 1/t` for exact block averages. The block statistic is
//! `sum_x rho_tau(x) phi_tau(x)`. `S` is always evaluated as
//! `S(previous, current, y)`.

use super::stats::{BlockOutcome, BlockStatistics, FiniteStatistic};
use crate::error::{Error, Result};
use crate::models::{FiniteGaussianHmm, InitialDistribution};

/// Filtering law `P(X_t = . | Y_{1:t})` at within-block time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    pub probs: Vec<f64>,
    pub t: usize,
}

impl FilterState {
    pub fn new(chi: &InitialDistribution, d: usize) -> Result<Self> {
        chi.validate()?;
        Ok(Self {
            probs: chi.expect_discrete(d)?.to_vec(),
            t: 0,
        })
    }
}

/// Row-major `d x d` kernel; row = current state, column = previous state.
#[derive(Debug, Clone, PartialEq)]
pub struct RetroKernel {
    d: usize,
    values: Vec<f64>,
}

impl RetroKernel {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, cur: usize, prev: usize) -> f64 {
        self.values[cur * self.d + prev]
    }

    pub fn row(&self, cur: usize) -> &[f64] {
        &self.values[cur * self.d..(cur + 1) * self.d]
    }
}

/// One `dim`-vector of running expectations per state, flattened row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherAccumulator {
    pub rho: Vec<f64>,
    pub dim: usize,
    pub t: usize,
}

impl SmootherAccumulator {
    pub fn new(d: usize, dim: usize) -> Self {
        Self {
            rho: vec![0.0; d * dim],
            dim,
            t: 0,
        }
    }

    pub fn slot(&self, state: usize) -> &[f64] {
        &self.rho[state * self.dim..(state + 1) * self.dim]
    }

    /// `sum_x rho(x) weights(x)`.
    pub fn contract(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (x, w) in weights.iter().enumerate() {
            for (o, r) in out.iter_mut().zip(self.slot(x)) {
                *o += w * r;
            }
        }
        out
    }
}

/// A vector-valued function `S(previous, current, y)` smoothed additively.
pub trait AdditiveFunctional {
    fn dim(&self) -> usize;

    /// `out += scale * S(prev, cur, y)`.
    fn add_scaled(&self, prev: usize, cur: usize, y: f64, scale: f64, out: &mut [f64]);

    /// `out += scale * sum_{prev} prev_weights[prev] * S(prev, cur, y)`.
    fn add_expected(&self, cur: usize, prev_weights: &[f64], y: f64, scale: f64, out: &mut [f64]) {
        for (prev, w) in prev_weights.iter().enumerate() {
            self.add_scaled(prev, cur, y, scale * w, out);
        }
    }
}

/// The indicator, first-moment, second-moment and pair-count statistics of
/// the finite Gaussian model, laid out as [`FiniteStatistic`].
#[derive(Debug, Clone, Copy)]
pub struct FiniteStatFunctional {
    pub d: usize,
}

impl AdditiveFunctional for FiniteStatFunctional {
    fn dim(&self) -> usize {
        FiniteStatistic::dim(self.d)
    }

    fn add_scaled(&self, prev: usize, cur: usize, y: f64, scale: f64, out: &mut [f64]) {
        let d = self.d;
        out[cur] += scale;
        out[d + cur] += scale * y;
        out[2 * d + cur] += scale * y * y;
        out[3 * d + prev * d + cur] += scale;
    }

    fn add_expected(&self, cur: usize, prev_weights: &[f64], y: f64, scale: f64, out: &mut [f64]) {
        let d = self.d;
        let mass: f64 = prev_weights.iter().sum();
        out[cur] += scale * mass;
        out[d + cur] += scale * mass * y;
        out[2 * d + cur] += scale * mass * y * y;
        for (prev, w) in prev_weights.iter().enumerate() {
            out[3 * d + prev * d + cur] += scale * w;
        }
    }
}

/// Predictive weights `sum_{x'} phi(x') m(x', x)`.
fn predict_into(probs: &[f64], theta: &FiniteGaussianHmm, pred: &mut [f64]) {
    pred.iter_mut().for_each(|p| *p = 0.0);
    for (from, &w) in probs.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (p, m) in pred.iter_mut().zip(theta.trans_row(from)) {
            *p += w * m;
        }
    }
}

/// Overwrites `pred` with the updated filter and returns the log normalizer
/// `log sum_x pred(x) g(x, y)`. Emission log-densities are shifted by their
/// maximum over reachable states so nothing underflows.
fn update_in_place(pred: &mut [f64], theta: &FiniteGaussianHmm, y: f64, step: usize) -> Result<f64> {
    let shift = (0..pred.len())
        .filter(|&x| pred[x] > 0.0)
        .map(|x| theta.log_emission(x, y))
        .fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(Error::DegenerateLikelihood { step });
    }
    let mut total = 0.0;
    for (x, p) in pred.iter_mut().enumerate() {
        if *p > 0.0 {
            *p *= (theta.log_emission(x, y) - shift).exp();
        }
        total += *p;
    }
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateLikelihood { step });
    }
    pred.iter_mut().for_each(|p| *p /= total);
    Ok(shift + total.ln())
}

fn kernel_into(probs: &[f64], pred: &[f64], theta: &FiniteGaussianHmm, kernel: &mut [f64], step: usize) -> Result<()> {
    let d = probs.len();
    for cur in 0..d {
        if !(pred[cur] > 0.0) {
            return Err(Error::DegenerateLikelihood { step });
        }
        let row = &mut kernel[cur * d..(cur + 1) * d];
        for (prev, r) in row.iter_mut().enumerate() {
            *r = probs[prev] * theta.trans(prev, cur) / pred[cur];
        }
    }
    Ok(())
}

fn smoother_into<F: AdditiveFunctional>(
    rho: &[f64],
    kernel: &[f64],
    functional: &F,
    y: f64,
    gamma: f64,
    out: &mut [f64],
) {
    let dim = functional.dim();
    let d = rho.len() / dim;
    out.iter_mut().for_each(|v| *v = 0.0);
    for cur in 0..d {
        let r_row = &kernel[cur * d..(cur + 1) * d];
        let slot = &mut out[cur * dim..(cur + 1) * dim];
        if gamma < 1.0 {
            for (prev, &r) in r_row.iter().enumerate() {
                if r == 0.0 {
                    continue;
                }
                let w = (1.0 - gamma) * r;
                for (o, v) in slot.iter_mut().zip(&rho[prev * dim..(prev + 1) * dim]) {
                    *o += w * v;
                }
            }
        }
        functional.add_expected(cur, r_row, y, gamma, slot);
    }
}

/// One filter update. Returns the new filter and `log p(y | past)`.
pub fn filter_step(state: &FilterState, theta: &FiniteGaussianHmm, y: f64) -> Result<(FilterState, f64)> {
    check_dim(state.probs.len(), theta)?;
    let mut pred = vec![0.0; theta.d()];
    predict_into(&state.probs, theta, &mut pred);
    let log_norm = update_in_place(&mut pred, theta, y, state.t + 1)?;
    Ok((
        FilterState {
            probs: pred,
            t: state.t + 1,
        },
        log_norm,
    ))
}

/// Backward kernel `r(x, x') = phi(x') m(x', x) / sum_{x''} phi(x'') m(x'', x)`
/// built from the filter at the previous step.
pub fn retrospective_kernel(state: &FilterState, theta: &FiniteGaussianHmm) -> Result<RetroKernel> {
    check_dim(state.probs.len(), theta)?;
    let d = theta.d();
    let mut pred = vec![0.0; d];
    predict_into(&state.probs, theta, &mut pred);
    let mut values = vec![0.0; d * d];
    kernel_into(&state.probs, &pred, theta, &mut values, state.t + 1)?;
    Ok(RetroKernel { d, values })
}

/// Exact-average smoother update at within-block time `t` (step size `1/t`).
pub fn smoother_step<F: AdditiveFunctional>(
    acc: &SmootherAccumulator,
    kernel: &RetroKernel,
    functional: &F,
    y: f64,
    t: usize,
) -> Result<SmootherAccumulator> {
    if t == 0 || acc.t + 1 != t {
        return Err(Error::IndexMismatch { acc: acc.t, step: t });
    }
    smoother_step_with_rate(acc, kernel, functional, y, 1.0 / t as f64)
}

/// Smoother update with an arbitrary step size `gamma` in (0, 1].
pub fn smoother_step_with_rate<F: AdditiveFunctional>(
    acc: &SmootherAccumulator,
    kernel: &RetroKernel,
    functional: &F,
    y: f64,
    gamma: f64,
) -> Result<SmootherAccumulator> {
    if acc.dim != functional.dim() || acc.rho.len() != kernel.d * acc.dim {
        return Err(Error::DimensionMismatch(format!(
            "accumulator holds {} values of width {}, kernel is {}x{}, functional width {}",
            acc.rho.len(),
            acc.dim,
            kernel.d,
            kernel.d,
            functional.dim()
        )));
    }
    let mut rho = vec![0.0; acc.rho.len()];
    smoother_into(&acc.rho, &kernel.values, functional, y, gamma, &mut rho);
    Ok(SmootherAccumulator {
        rho,
        dim: acc.dim,
        t: acc.t + 1,
    })
}

fn check_dim(len: usize, theta: &FiniteGaussianHmm) -> Result<()> {
    if len != theta.d() {
        return Err(Error::DimensionMismatch(format!(
            "filter has {len} states, model has {}",
            theta.d()
        )));
    }
    Ok(())
}

/// Reusable buffers for running the recursion one observation at a time.
///
/// Used for whole blocks (`gamma = 1/t`) and by the online EM baseline,
/// which supplies its own step sizes and may change `theta` between steps.
#[derive(Debug, Clone)]
pub struct ForwardSmoother<F> {
    functional: F,
    d: usize,
    probs: Vec<f64>,
    pred: Vec<f64>,
    kernel: Vec<f64>,
    rho: Vec<f64>,
    scratch: Vec<f64>,
    t: usize,
    log_likelihood: f64,
}

impl<F: AdditiveFunctional> ForwardSmoother<F> {
    pub fn new(functional: F, chi: &InitialDistribution, d: usize) -> Result<Self> {
        let probs = FilterState::new(chi, d)?.probs;
        let dim = functional.dim();
        Ok(Self {
            functional,
            d,
            probs,
            pred: vec![0.0; d],
            kernel: vec![0.0; d * d],
            rho: vec![0.0; d * dim],
            scratch: vec![0.0; d * dim],
            t: 0,
            log_likelihood: 0.0,
        })
    }

    /// Consumes one observation using step size `gamma`.
    pub fn step(&mut self, theta: &FiniteGaussianHmm, y: f64, gamma: f64) -> Result<()> {
        check_dim(self.d, theta)?;
        let step = self.t + 1;
        predict_into(&self.probs, theta, &mut self.pred);
        kernel_into(&self.probs, &self.pred, theta, &mut self.kernel, step)?;
        let log_norm = update_in_place(&mut self.pred, theta, y, step)?;
        smoother_into(&self.rho, &self.kernel, &self.functional, y, gamma, &mut self.scratch);
        std::mem::swap(&mut self.rho, &mut self.scratch);
        std::mem::swap(&mut self.probs, &mut self.pred);
        self.log_likelihood += log_norm;
        self.t = step;
        Ok(())
    }

    /// Consumes one observation with the exact-average step `1/t`.
    pub fn step_average(&mut self, theta: &FiniteGaussianHmm, y: f64) -> Result<()> {
        let gamma = 1.0 / (self.t + 1) as f64;
        self.step(theta, y, gamma)
    }

    /// Current smoothed statistic `sum_x rho_t(x) phi_t(x)`.
    pub fn statistic(&self) -> Vec<f64> {
        let dim = self.functional.dim();
        let mut out = vec![0.0; dim];
        for (x, w) in self.probs.iter().enumerate() {
            for (o, r) in out.iter_mut().zip(&self.rho[x * dim..(x + 1) * dim]) {
                *o += w * r;
            }
        }
        out
    }

    pub fn filter(&self) -> &[f64] {
        &self.probs
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }
}

/// Smooths an arbitrary additive functional over a block.
/// Returns the averaged statistic, the terminal filter and the block log-likelihood.
pub fn smooth_additive<F: AdditiveFunctional>(
    theta: &FiniteGaussianHmm,
    chi: &InitialDistribution,
    block: &[f64],
    functional: F,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if block.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let mut sm = ForwardSmoother::new(functional, chi, theta.d())?;
    for &y in block {
        sm.step_average(theta, y)?;
    }
    Ok((sm.statistic(), sm.filter().to_vec(), sm.log_likelihood()))
}

/// Block statistic of the finite model in a single forward pass,
/// `O(d^2 dim)` work per observation.
pub fn block_stats_finite(
    theta: &FiniteGaussianHmm,
    chi: &InitialDistribution,
    block: &[f64],
) -> Result<BlockOutcome<FiniteStatistic>> {
    let d = theta.d();
    let (values, terminal, log_likelihood) = smooth_additive(theta, chi, block, FiniteStatFunctional { d })?;
    Ok(BlockOutcome {
        stat: FiniteStatistic::from_flat(d, values)?,
        terminal: InitialDistribution::Discrete(terminal),
        log_likelihood,
    })
}

impl BlockStatistics for FiniteGaussianHmm {
    type Stat = FiniteStatistic;

    fn block_stats(&self, chi: &InitialDistribution, block: &[f64]) -> Result<BlockOutcome<FiniteStatistic>> {
        block_stats_finite(self, chi, block)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smoothing::SufficientStatistic;
    use approx::assert_relative_eq;

    fn uniform2(var: f64) -> FiniteGaussianHmm {
        FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![0.5, 0.5]; 2], var).unwrap()
    }

    #[test]
    fn symmetric_filter_stays_uniform() {
        let theta = uniform2(1.0);
        let state = FilterState { probs: vec![0.5, 0.5], t: 0 };
        // y = 0.5 is equidistant from both levels.
        let (next, _) = filter_step(&state, &theta, 0.5).unwrap();
        assert_relative_eq!(next.probs[0], 0.5, epsilon = 1e-15);
        assert_eq!(next.t, 1);
    }

    #[test]
    fn absorbing_chain_keeps_point_mass() {
        let theta = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1.0).unwrap();
        let mut state = FilterState { probs: vec![1.0, 0.0], t: 0 };
        for y in [-3.0, 0.0, 40.0, 1e3] {
            state = filter_step(&state, &theta, y).unwrap().0;
            assert_eq!(state.probs, vec![1.0, 0.0]);
        }
    }

    #[test]
    fn far_observation_does_not_underflow() {
        let theta = uniform2(1e-3);
        let state = FilterState { probs: vec![0.5, 0.5], t: 0 };
        let (next, log_norm) = filter_step(&state, &theta, 500.0).unwrap();
        assert_relative_eq!(next.probs[1], 1.0, epsilon = 1e-12);
        assert!(log_norm.is_finite());
    }

    #[test]
    fn kernel_symmetry_and_point_mass() {
        let theta = FiniteGaussianHmm::new(vec![0.0, 1.0, 2.0], vec![vec![1.0 / 3.0; 3]; 3], 1.0).unwrap();
        let k = retrospective_kernel(&FilterState { probs: vec![1.0 / 3.0; 3], t: 0 }, &theta).unwrap();
        for cur in 0..3 {
            for prev in 0..3 {
                assert_relative_eq!(k.get(cur, prev), 1.0 / 3.0, epsilon = 1e-15);
            }
        }
        let theta = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![0.3, 0.7], vec![0.6, 0.4]], 1.0).unwrap();
        let k = retrospective_kernel(&FilterState { probs: vec![1.0, 0.0], t: 0 }, &theta).unwrap();
        for cur in 0..2 {
            assert_eq!(k.get(cur, 0), 1.0);
            assert_eq!(k.get(cur, 1), 0.0);
        }
    }

    #[test]
    fn kernel_zero_column_is_degenerate() {
        let theta = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1.0).unwrap();
        let err = retrospective_kernel(&FilterState { probs: vec![1.0, 0.0], t: 0 }, &theta).unwrap_err();
        assert!(matches!(err, Error::DegenerateLikelihood { .. }));
    }

    #[test]
    fn smoother_rejects_wrong_time() {
        let theta = uniform2(1.0);
        let k = retrospective_kernel(&FilterState { probs: vec![0.5, 0.5], t: 0 }, &theta).unwrap();
        let f = FiniteStatFunctional { d: 2 };
        let acc = SmootherAccumulator::new(2, f.dim());
        assert_eq!(
            smoother_step(&acc, &k, &f, 0.0, 2).unwrap_err(),
            Error::IndexMismatch { acc: 0, step: 2 }
        );
        assert!(smoother_step(&acc, &k, &f, 0.0, 0).is_err());
    }

    #[test]
    fn first_smoother_step_collapses_to_expected_statistic() {
        let theta = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![0.3, 0.7], vec![0.6, 0.4]], 1.0).unwrap();
        let state = FilterState { probs: vec![0.2, 0.8], t: 0 };
        let k = retrospective_kernel(&state, &theta).unwrap();
        let f = FiniteStatFunctional { d: 2 };
        let acc = smoother_step(&SmootherAccumulator::new(2, f.dim()), &k, &f, 0.7, 1).unwrap();
        for cur in 0..2 {
            let mut expected = vec![0.0; f.dim()];
            for prev in 0..2 {
                f.add_scaled(prev, cur, 0.7, k.get(cur, prev), &mut expected);
            }
            for (a, b) in acc.slot(cur).iter().zip(&expected) {
                assert_relative_eq!(a, b, epsilon = 1e-15);
            }
        }
    }

    struct Constant(f64);

    impl AdditiveFunctional for Constant {
        fn dim(&self) -> usize {
            2
        }
        fn add_scaled(&self, _: usize, _: usize, _: f64, scale: f64, out: &mut [f64]) {
            out[0] += scale * self.0;
            out[1] -= scale * self.0;
        }
    }

    #[test]
    fn constant_functional_is_preserved() {
        let theta = FiniteGaussianHmm::new(vec![0.0, 1.0, 3.0], vec![vec![0.2, 0.5, 0.3], vec![0.1, 0.1, 0.8], vec![0.6, 0.2, 0.2]], 0.8)
            .unwrap();
        let chi = InitialDistribution::discrete(vec![0.1, 0.3, 0.6]).unwrap();
        let mut sm = ForwardSmoother::new(Constant(2.5), &chi, 3).unwrap();
        for (i, y) in [0.1, 2.2, -0.4, 3.3, 1.0].into_iter().enumerate() {
            sm.step_average(&theta, y).unwrap();
            assert_eq!(sm.t(), i + 1);
            for x in 0..3 {
                assert_relative_eq!(sm.rho[x * 2], 2.5, epsilon = 1e-14);
                assert_relative_eq!(sm.rho[x * 2 + 1], -2.5, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn single_observation_block() {
        let theta = FiniteGaussianHmm::new(vec![0.0, 2.0], vec![vec![0.9, 0.1], vec![0.2, 0.8]], 1.0).unwrap();
        let chi = InitialDistribution::discrete(vec![0.3, 0.7]).unwrap();
        let y = 1.3;
        let out = block_stats_finite(&theta, &chi, &[y]).unwrap();
        let un: Vec<f64> = (0..2)
            .map(|x| (0.3 * theta.trans(0, x) + 0.7 * theta.trans(1, x)) * theta.emission_density(x, y).unwrap())
            .collect();
        let z: f64 = un.iter().sum();
        for x in 0..2 {
            assert_relative_eq!(out.stat.s0()[x], un[x] / z, epsilon = 1e-14);
            assert_relative_eq!(out.stat.s1()[x], y * un[x] / z, epsilon = 1e-14);
        }
        assert_relative_eq!(out.log_likelihood, z.ln(), epsilon = 1e-14);
        out.stat.validate().unwrap();
    }

    #[test]
    fn empty_block_rejected() {
        let theta = uniform2(1.0);
        assert_eq!(
            block_stats_finite(&theta, &InitialDistribution::uniform(2), &[]).unwrap_err(),
            Error::EmptyBlock
        );
    }

    #[test]
    fn stepwise_api_matches_fused_pass() {
        let theta = FiniteGaussianHmm::new(vec![0.0, 1.0, 3.0], vec![vec![0.2, 0.5, 0.3], vec![0.1, 0.1, 0.8], vec![0.6, 0.2, 0.2]], 0.8)
            .unwrap();
        let chi = InitialDistribution::uniform(3);
        let ys = [0.3, 1.9, 2.5, -0.2, 0.8, 3.1];
        let f = FiniteStatFunctional { d: 3 };
        let mut filt = FilterState::new(&chi, 3).unwrap();
        let mut acc = SmootherAccumulator::new(3, f.dim());
        for (i, &y) in ys.iter().enumerate() {
            let k = retrospective_kernel(&filt, &theta).unwrap();
            acc = smoother_step(&acc, &k, &f, y, i + 1).unwrap();
            filt = filter_step(&filt, &theta, y).unwrap().0;
        }
        let fused = block_stats_finite(&theta, &chi, &ys).unwrap();
        for (a, b) in acc.contract(&filt.probs).iter().zip(fused.stat.as_slice()) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
        assert_eq!(fused.terminal, InitialDistribution::Discrete(filt.probs));
    }
}
