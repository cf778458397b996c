#![allow(dead_code)]

use boem::models::rng::SimRng;
use boem::{FiniteGaussianHmm, InitialDistribution, LgssmParams};

pub fn random_probs(rng: &mut SimRng, d: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| 0.05 + rng.uniform()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

pub fn random_finite(rng: &mut SimRng, d: usize) -> FiniteGaussianHmm {
    let states = (0..d).map(|_| -2.0 + 4.0 * rng.uniform()).collect();
    let trans = (0..d).map(|_| random_probs(rng, d)).collect();
    let var = 0.3 + 1.7 * rng.uniform();
    FiniteGaussianHmm::new(states, trans, var).unwrap()
}

pub fn random_lgssm(rng: &mut SimRng) -> LgssmParams {
    let phi = -0.95 + 1.9 * rng.uniform();
    LgssmParams::new(phi, 0.2 + 1.8 * rng.uniform(), 0.2 + 1.8 * rng.uniform()).unwrap()
}

pub fn random_gaussian_chi(rng: &mut SimRng) -> InitialDistribution {
    InitialDistribution::gaussian(-1.0 + 2.0 * rng.uniform(), 0.2 + 2.8 * rng.uniform()).unwrap()
}

pub fn random_block(rng: &mut SimRng, tau: usize, scale: f64) -> Vec<f64> {
    (0..tau).map(|_| scale * rng.standard_normal()).collect()
}

/// Stationary law of a row-stochastic matrix by power iteration.
pub fn stationary(theta: &FiniteGaussianHmm) -> Vec<f64> {
    let d = theta.d();
    let mut pi = vec![1.0 / d as f64; d];
    for _ in 0..10_000 {
        let next: Vec<f64> = (0..d).map(|j| (0..d).map(|i| pi[i] * theta.trans(i, j)).sum()).collect();
        let delta: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if delta < 1e-15 {
            break;
        }
    }
    pi
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
