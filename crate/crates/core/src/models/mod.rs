//! Model families, parameter validation and synthetic data.

mod finite;
mod initial;
mod lgssm;
pub mod rng;
mod simulate;

pub use finite::{validate_finite_hmm, FiniteGaussianHmm, STOCHASTIC_TOL};
pub use initial::InitialDistribution;
pub use lgssm::LgssmParams;
pub use simulate::{read_observations_csv, simulate_finite, simulate_lgssm, HiddenStates, SimulatedPath};
