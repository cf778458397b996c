//! Exact block sufficient statistics and their brute-force references.

mod finite;
mod forgetting;
mod lgssm;
mod oracle;
mod stats;

pub use finite::{
    block_stats_finite, filter_step, retrospective_kernel, smooth_additive, smoother_step,
    smoother_step_with_rate, AdditiveFunctional, FilterState, FiniteStatFunctional, ForwardSmoother,
    RetroKernel, SmootherAccumulator,
};
pub use forgetting::forgetting_gap;
pub use lgssm::{block_stats_lgssm, smooth_lgssm, SmoothedMoments};
pub use oracle::{
    block_stats_finite_oracle, block_stats_lgssm_oracle, lgssm_block_posterior, OracleOutcome, MAX_DENSE_BLOCK,
    MAX_PATHS,
};
pub use stats::{BlockOutcome, BlockStatistics, FiniteStatistic, LgssmStatistic, SufficientStatistic};
