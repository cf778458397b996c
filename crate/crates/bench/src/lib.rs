//! Fixed inputs for the benchmarks.

use boem::harness::presets;
use boem::models::{simulate_finite, simulate_lgssm, FiniteGaussianHmm, InitialDistribution, LgssmParams};

pub const SEED: u64 = 2024;

pub fn finite_model() -> FiniteGaussianHmm {
    presets::six_state_truth()
}

pub fn lgssm_model() -> LgssmParams {
    presets::lgssm_truth()
}

pub fn finite_stream(n: usize) -> Vec<f64> {
    let theta = finite_model();
    simulate_finite(&theta, &InitialDistribution::uniform(theta.d()), n, SEED)
        .expect("valid model")
        .observations
}

pub fn lgssm_stream(n: usize) -> Vec<f64> {
    simulate_lgssm(&lgssm_model(), n, SEED).expect("valid model").observations
}
