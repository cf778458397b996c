//! Reference configurations of the two simulation studies.

use super::config::{ExperimentConfig, FamilySpec};
use crate::estimators::{Algorithm, BlockSchedule, DEFAULT_BURN_IN};
use crate::models::{FiniteGaussianHmm, LgssmParams};

pub fn lgssm_truth() -> LgssmParams {
    LgssmParams::new(0.9, 0.6, 1.0).expect("valid preset")
}

pub fn lgssm_start() -> LgssmParams {
    LgssmParams::new(0.1, 1.0, 2.0).expect("valid preset")
}

pub fn six_state_transitions() -> Vec<Vec<f64>> {
    vec![
        vec![0.5, 0.05, 0.1, 0.15, 0.15, 0.05],
        vec![0.2, 0.35, 0.1, 0.15, 0.05, 0.15],
        vec![0.1, 0.1, 0.6, 0.05, 0.05, 0.1],
        vec![0.02, 0.03, 0.1, 0.7, 0.1, 0.05],
        vec![0.1, 0.05, 0.13, 0.02, 0.6, 0.1],
        vec![0.1, 0.1, 0.13, 0.12, 0.1, 0.45],
    ]
}

/// Levels 0..5, unit noise variance.
pub fn six_state_truth() -> FiniteGaussianHmm {
    FiniteGaussianHmm::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], six_state_transitions(), 1.0).expect("valid preset")
}

/// `count` evenly spaced checkpoints ending at `budget`.
pub fn linear_checkpoints(budget: usize, count: usize) -> Vec<usize> {
    (1..=count).map(|l| (budget as f64 * l as f64 / count as f64).round() as usize).collect()
}

/// `count` log-spaced checkpoints from `lo` to `hi` inclusive.
pub fn log_checkpoints(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut ck: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    ck.dedup();
    ck
}

/// AR(1) study: `tau_n = n^1.1`, plain and averaged block EM.
pub fn lgssm_convergence(n_runs: usize, budget: usize, base_seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        algorithms: vec![Algorithm::Boem, Algorithm::BoemAvg],
        checkpoints: log_checkpoints(100, budget, 13),
        params: Some(vec!["phi".into()]),
        ..ExperimentConfig::new(
            FamilySpec::Lgssm {
                truth: lgssm_truth(),
                init: lgssm_start(),
            },
            n_runs,
            budget,
            base_seed,
        )
    }
}

/// Block-size study: same model, seven evenly spaced checkpoints.
pub fn lgssm_block_sizes(n_runs: usize, budget: usize, base_seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        checkpoints: linear_checkpoints(budget, 7),
        ..lgssm_convergence(n_runs, budget, base_seed)
    }
}

pub const BLOCK_SIZE_EXPONENTS: [f64; 4] = [1.2, 1.8, 2.0, 2.5];

/// Start used when the levels are estimated: levels (-1, 0, 0.5, 2, 3, 4),
/// variance 2, true transitions.
pub fn six_state_levels_start() -> FiniteGaussianHmm {
    FiniteGaussianHmm::new(vec![-1.0, 0.0, 0.5, 2.0, 3.0, 4.0], six_state_transitions(), 2.0).expect("valid preset")
}

/// Start used when the transitions are estimated: true levels, variance 2,
/// every transition 1/6.
pub fn six_state_transitions_start() -> FiniteGaussianHmm {
    FiniteGaussianHmm::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], vec![vec![1.0 / 6.0; 6]; 6], 2.0).expect("valid preset")
}

/// Six-state model with block EM and online EM (`gamma_n = n^-0.53`).
///
/// Both methods wait for the same burn-in before their first M-step: a
/// one-observation block would put every level at `y_1` with zero variance.
fn six_state(init: FiniteGaussianHmm, fixed: &str, params: [&str; 2], n_runs: usize, budget: usize, base_seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        boem_burn_in: DEFAULT_BURN_IN,
        algorithms: Algorithm::ALL.to_vec(),
        fixed: vec![fixed.into()],
        checkpoints: log_checkpoints(100, budget, 13),
        params: Some(params.iter().map(|p| p.to_string()).collect()),
        ..ExperimentConfig::new(
            FamilySpec::Finite {
                truth: six_state_truth(),
                init,
            },
            n_runs,
            budget,
            base_seed,
        )
    }
}

/// Estimates `v` and the levels; transitions held at their true value.
pub fn six_state_levels(n_runs: usize, budget: usize, base_seed: u64) -> ExperimentConfig {
    six_state(six_state_levels_start(), "m", ["v", "x1"], n_runs, budget, base_seed)
}

/// Estimates `v` and the transitions; levels held at their true value.
pub fn six_state_transitions_study(n_runs: usize, budget: usize, base_seed: u64) -> ExperimentConfig {
    six_state(six_state_transitions_start(), "x", ["v", "m1_1"], n_runs, budget, base_seed)
}

/// Schedule with `c = 1` and the given exponent.
pub fn power_schedule(a: f64) -> BlockSchedule {
    BlockSchedule::new(1.0, a).expect("exponent > 1")
}
