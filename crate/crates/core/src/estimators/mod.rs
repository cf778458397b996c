//! Block schedule, M-steps, block online EM (plain and averaged) and the
//! online EM baseline.

mod batch;
mod boem;
mod family;
mod mstep;
mod oem;
mod schedule;
mod trajectory;

pub use batch::{batch_em, batch_em_step};
pub use boem::{boem_run, update_average, BoemOptions, BoemOutput, BoemState, ChiPolicy};
pub use family::ModelFamily;
pub use mstep::{
    complete_data_objective_finite, complete_data_objective_lgssm, mstep_finite, mstep_finite_partial, mstep_lgssm,
    mstep_lgssm_partial, ParamBounds, FINITE_GROUPS, LGSSM_GROUPS,
};
pub use oem::{oem_run, OemOptions, OemOutput, OemState, DEFAULT_BURN_IN};
pub use schedule::{Block, BlockSchedule};
pub use trajectory::{Algorithm, Checkpoint, EstimatorTrajectory};
