//! Block online EM for hidden Markov models.
//!
//! Two model families are supported with exact block statistics: a finite
//! state chain observed in Gaussian noise ([`FiniteGaussianHmm`]) and a
//! scalar AR(1) state observed in Gaussian noise ([`LgssmParams`]). The
//! estimators hold the parameter fixed over blocks of growing length
//! `tau_n = floor(c n^a)`, smooth each block exactly, and apply a closed-form
//! M-step at block boundaries. The averaged variant applies the M-step to the
//! length-weighted mean of all block statistics so far.
//!
//! [`harness`] runs seeded Monte Carlo studies over both families.

pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod models;
pub mod numeric;
pub mod smoothing;

pub use error::{Error, Result};
pub use estimators::{
    boem_run, oem_run, Algorithm, BlockSchedule, BoemOptions, ChiPolicy, EstimatorTrajectory, ModelFamily, OemOptions,
    ParamBounds,
};
pub use models::{FiniteGaussianHmm, InitialDistribution, LgssmParams, SimulatedPath};
pub use smoothing::{BlockStatistics, FiniteStatistic, LgssmStatistic, SufficientStatistic};
