use crate::error::{Error, Result};

/// Tolerance on the total mass of a discrete initial distribution.
pub const MASS_TOL: f64 = 1e-12;

/// Law of the hidden state just before the first observation of a block.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDistribution {
    Discrete(Vec<f64>),
    Gaussian { mean: f64, var: f64 },
}

impl InitialDistribution {
    pub fn discrete(weights: Vec<f64>) -> Result<Self> {
        let chi = Self::Discrete(weights);
        chi.validate()?;
        Ok(chi)
    }

    pub fn uniform(d: usize) -> Self {
        Self::Discrete(vec![1.0 / d as f64; d])
    }

    pub fn gaussian(mean: f64, var: f64) -> Result<Self> {
        let chi = Self::Gaussian { mean, var };
        chi.validate()?;
        Ok(chi)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Discrete(w) => {
                if w.is_empty() {
                    return Err(Error::InvalidInitialDistribution("empty weight vector".into()));
                }
                let sum: f64 = w.iter().sum();
                if w.iter().any(|&p| !(p >= 0.0)) || !((sum - 1.0).abs() <= MASS_TOL) {
                    return Err(Error::InvalidInitialDistribution(format!(
                        "weights must be nonnegative and sum to 1 (sum {sum})"
                    )));
                }
            }
            Self::Gaussian { mean, var } => {
                if !mean.is_finite() || !(*var > 0.0) || !var.is_finite() {
                    return Err(Error::InvalidInitialDistribution(format!(
                        "gaussian needs finite mean and positive variance (mean {mean}, var {var})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn expect_discrete(&self, d: usize) -> Result<&[f64]> {
        match self {
            Self::Discrete(w) if w.len() == d => Ok(w),
            Self::Discrete(w) => Err(Error::DimensionMismatch(format!(
                "initial distribution has {} states, model has {d}",
                w.len()
            ))),
            Self::Gaussian { .. } => Err(Error::DimensionMismatch(
                "finite model needs a discrete initial distribution".into(),
            )),
        }
    }

    pub(crate) fn expect_gaussian(&self) -> Result<(f64, f64)> {
        match *self {
            Self::Gaussian { mean, var } => Ok((mean, var)),
            Self::Discrete(_) => Err(Error::DimensionMismatch(
                "linear gaussian model needs a gaussian initial distribution".into(),
            )),
        }
    }
}
