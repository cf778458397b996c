use rayon::prelude::*;

use super::config::{ExperimentConfig, FamilySpec};
use super::summary::{group_by_algorithm, SummaryTable};
use crate::error::{Error, Result};
use crate::estimators::{boem_run, oem_run, Algorithm, BoemOptions, EstimatorTrajectory, ModelFamily, OemOptions};
use crate::models::{simulate_finite, simulate_lgssm, InitialDistribution, SimulatedPath};

/// Outcome of one Monte Carlo replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    pub result: Result<Vec<EstimatorTrajectory>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub runs: Vec<RunRecord>,
    pub summary: SummaryTable,
    /// Runs that failed and were left out of the summary.
    pub excluded: usize,
}

impl ExperimentResult {
    /// Successful trajectories of one algorithm, in run order.
    pub fn trajectories(&self, algorithm: Algorithm) -> Vec<&EstimatorTrajectory> {
        self.runs
            .iter()
            .filter_map(|r| r.result.as_ref().ok())
            .flat_map(|ts| ts.iter().filter(move |t| t.algorithm == algorithm))
            .collect()
    }

    /// `(run_id, trajectory)` pairs for all successful runs.
    pub fn all_trajectories(&self) -> Vec<(usize, &EstimatorTrajectory)> {
        self.runs
            .iter()
            .filter_map(|r| r.result.as_ref().ok().map(|ts| (r.run_id, ts)))
            .flat_map(|(id, ts)| ts.iter().map(move |t| (id, t)))
            .collect()
    }
}

/// Simulates `n` observations from the true model. Finite chains start
/// from the uniform law, linear chains from their stationary law.
pub fn simulate_truth(family: &FamilySpec, n: usize, seed: u64) -> Result<SimulatedPath> {
    match family {
        FamilySpec::Lgssm { truth, .. } => simulate_lgssm(truth, n, seed),
        FamilySpec::Finite { truth, .. } => simulate_finite(truth, &InitialDistribution::uniform(truth.d()), n, seed),
    }
}

/// Fits every configured algorithm to one observation stream.
pub fn fit_observations(cfg: &ExperimentConfig, observations: &[f64]) -> Result<Vec<EstimatorTrajectory>> {
    match &cfg.family {
        FamilySpec::Lgssm { init, .. } => fit_block(cfg, init, observations),
        FamilySpec::Finite { init, .. } => {
            let mut out = fit_block(cfg, init, observations)?;
            if cfg.algorithms.iter().any(|a| !a.is_block()) {
                let opts = OemOptions {
                    gamma_exponent: cfg.gamma_exponent,
                    burn_in: cfg.burn_in,
                    avg_start: cfg.avg_start(),
                    fixed: cfg.fixed.clone(),
                    checkpoints: cfg.checkpoints.clone(),
                    bounds: cfg.bounds,
                };
                let oem = oem_run(init, &init.default_initial(), observations, None, &opts)?;
                out.extend([oem.plain, oem.averaged]);
            }
            out.retain(|t| cfg.algorithms.contains(&t.algorithm));
            Ok(out)
        }
    }
}

/// Simulates and fits a single replicate.
pub fn run_single(cfg: &ExperimentConfig, run_id: usize) -> Result<Vec<EstimatorTrajectory>> {
    let path = simulate_truth(&cfg.family, cfg.budget, cfg.seed(run_id))?;
    fit_observations(cfg, &path.observations)
}

fn fit_block<M: ModelFamily>(cfg: &ExperimentConfig, init: &M, observations: &[f64]) -> Result<Vec<EstimatorTrajectory>> {
    if !cfg.algorithms.iter().any(|a| a.is_block()) {
        return Ok(Vec::new());
    }
    let opts = BoemOptions {
        averaged: cfg.algorithms.contains(&Algorithm::BoemAvg),
        chi_policy: cfg.chi_policy,
        burn_in: cfg.boem_burn_in,
        fixed: cfg.fixed.clone(),
        checkpoints: cfg.checkpoints.clone(),
        bounds: cfg.bounds,
    };
    let out = boem_run(init, &init.default_initial(), &cfg.schedule, observations, None, &opts)?;
    let mut trajs = vec![out.plain];
    trajs.extend(out.averaged);
    trajs.retain(|t| cfg.algorithms.contains(&t.algorithm));
    Ok(trajs)
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs `n_runs` seeded replicates in parallel and summarizes them.
///
/// Results are collected in run order, so the output depends only on the
/// configuration. Failed runs are kept in `runs` with their error and
/// excluded from the summary.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let runs: Vec<RunRecord> = in_pool(cfg.threads, || {
        (0..cfg.n_runs)
            .into_par_iter()
            .map(|run_id| RunRecord {
                run_id,
                seed: cfg.seed(run_id),
                result: run_single(cfg, run_id),
            })
            .collect()
    })?;
    let excluded = runs.iter().filter(|r| r.result.is_err()).count();
    let ok = runs.iter().filter_map(|r| r.result.as_ref().ok()).flatten();
    let summary = SummaryTable::from_groups(&group_by_algorithm(ok), cfg.params.as_deref());
    Ok(ExperimentResult { runs, summary, excluded })
}

/// Label of a block-size variant, e.g. `boem/a=1.2`.
pub fn schedule_label(algorithm: Algorithm, a: f64) -> String {
    format!("{}/a={a}", algorithm.label())
}

/// Repeats a block EM experiment for each schedule exponent (with `c = 1`)
/// on the same seeds. Rows are labelled with [`schedule_label`].
pub fn variance_vs_schedule(cfg: &ExperimentConfig, exponents: &[f64]) -> Result<Vec<(f64, ExperimentResult)>> {
    exponents
        .iter()
        .map(|&a| {
            let schedule = crate::estimators::BlockSchedule::new(1.0, a)?;
            let cfg = ExperimentConfig {
                schedule,
                algorithms: vec![Algorithm::Boem, Algorithm::BoemAvg],
                ..cfg.clone()
            };
            let mut result = run_experiment(&cfg)?;
            for row in &mut result.summary.rows {
                let alg: Algorithm = row.algorithm.parse()?;
                row.algorithm = schedule_label(alg, a);
            }
            Ok((a, result))
        })
        .collect()
}
