//! Seeded Monte Carlo studies: replicate runs, across-run summaries and
//! convergence-rate fits.

mod config;
mod experiment;
pub mod presets;
mod rates;
mod summary;

pub use config::{ExperimentConfig, FamilySpec};
pub use experiment::{
    fit_observations, run_experiment, run_single, schedule_label, simulate_truth, variance_vs_schedule, ExperimentResult,
    RunRecord,
};
pub use rates::{rate_slope, RateEstimate, RateOptions};
pub use summary::{
    group_by_algorithm, read_trajectories_csv, write_trajectories_csv, SummaryRow, SummaryTable, TrajectoryRow,
    SUMMARY_HEADER, TRAJECTORY_HEADER,
};
