use crate::error::{Error, Result};
use crate::estimators::{Algorithm, BlockSchedule, ChiPolicy, ModelFamily, ParamBounds, DEFAULT_BURN_IN};
use crate::models::{FiniteGaussianHmm, LgssmParams};

/// Data-generating parameters and the estimators' starting point.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Lgssm { truth: LgssmParams, init: LgssmParams },
    Finite { truth: FiniteGaussianHmm, init: FiniteGaussianHmm },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Lgssm { .. } => "lgssm",
            FamilySpec::Finite { .. } => "finite",
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        match self {
            FamilySpec::Lgssm { .. } => LgssmParams::param_names(),
            FamilySpec::Finite { truth, .. } => FiniteGaussianHmm::param_names(truth.d()),
        }
    }

    /// Scalar parameter used for rate fits by default.
    pub fn default_rate_param(&self) -> &'static str {
        match self {
            FamilySpec::Lgssm { .. } => "phi",
            FamilySpec::Finite { .. } => "v",
        }
    }

    pub fn param_groups(&self) -> &'static [&'static str] {
        match self {
            FamilySpec::Lgssm { .. } => LgssmParams::param_groups(),
            FamilySpec::Finite { .. } => FiniteGaussianHmm::param_groups(),
        }
    }

    pub fn true_values(&self) -> Vec<f64> {
        match self {
            FamilySpec::Lgssm { truth, .. } => truth.param_values(),
            FamilySpec::Finite { truth, .. } => truth.param_values(),
        }
    }

    /// True value of a named parameter.
    pub fn true_value(&self, param: &str) -> Option<f64> {
        let i = self.param_names().iter().position(|p| p == param)?;
        Some(self.true_values()[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: FamilySpec,
    pub algorithms: Vec<Algorithm>,
    pub schedule: BlockSchedule,
    pub gamma_exponent: f64,
    /// Online EM burn-in.
    pub burn_in: usize,
    /// Block EM burn-in (see `BoemOptions::burn_in`).
    pub boem_burn_in: usize,
    /// Start of parameter averaging for online EM; `None` means 10% of the budget.
    pub avg_start: Option<usize>,
    pub chi_policy: ChiPolicy,
    /// Parameter groups held at their initial value.
    pub fixed: Vec<String>,
    pub n_runs: usize,
    /// Observations simulated per run.
    pub budget: usize,
    pub checkpoints: Vec<usize>,
    /// Parameters to summarize; `None` keeps all.
    pub params: Option<Vec<String>>,
    /// Run `i` uses seed `base_seed + i`.
    pub base_seed: u64,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
    pub bounds: ParamBounds,
}

impl ExperimentConfig {
    pub fn new(family: FamilySpec, n_runs: usize, budget: usize, base_seed: u64) -> Self {
        Self {
            family,
            algorithms: vec![Algorithm::Boem, Algorithm::BoemAvg],
            schedule: BlockSchedule::new(1.0, 1.1).expect("valid default schedule"),
            gamma_exponent: 0.53,
            burn_in: DEFAULT_BURN_IN,
            boem_burn_in: 0,
            avg_start: None,
            chi_policy: ChiPolicy::WarmStart,
            fixed: Vec::new(),
            n_runs,
            budget,
            checkpoints: vec![budget],
            params: None,
            base_seed,
            threads: None,
            bounds: ParamBounds::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs < 1 {
            return Err(Error::InvalidConfig("need at least one run".into()));
        }
        if self.budget < 1 {
            return Err(Error::InvalidConfig("observation budget must be positive".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms selected".into()));
        }
        if self.checkpoints.is_empty() || self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("checkpoints must be nonempty and strictly ascending".into()));
        }
        if self.checkpoints[self.checkpoints.len() - 1] > self.budget {
            return Err(Error::InvalidConfig(format!(
                "last checkpoint {} exceeds budget {}",
                self.checkpoints[self.checkpoints.len() - 1],
                self.budget
            )));
        }
        let online = self.algorithms.iter().any(|a| !a.is_block());
        if online {
            if !matches!(self.family, FamilySpec::Finite { .. }) {
                return Err(Error::InvalidConfig("online EM is only available for the finite model".into()));
            }
            if !(self.gamma_exponent > 0.5 && self.gamma_exponent <= 1.0) {
                return Err(Error::InvalidStepSize(self.gamma_exponent));
            }
            if self.burn_in < 1 {
                return Err(Error::InvalidConfig("burn-in must be at least 1".into()));
            }
        }
        let groups = self.family.param_groups();
        if let Some(bad) = self.fixed.iter().find(|g| !groups.contains(&g.as_str())) {
            return Err(Error::InvalidConfig(format!(
                "unknown parameter group {bad:?} (expected one of {})",
                groups.join(", ")
            )));
        }
        if let Some(params) = &self.params {
            let names = self.family.param_names();
            if let Some(bad) = params.iter().find(|p| !names.contains(p)) {
                return Err(Error::InvalidConfig(format!("unknown parameter {bad:?}")));
            }
        }
        match &self.family {
            FamilySpec::Lgssm { truth, init } => {
                truth.validate()?;
                init.validate()?;
            }
            FamilySpec::Finite { truth, init } => {
                truth.validate()?;
                init.validate()?;
                if truth.d() != init.d() {
                    return Err(Error::DimensionMismatch("truth and start differ in state count".into()));
                }
            }
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("thread count must be positive".into()));
        }
        Ok(())
    }

    pub fn avg_start(&self) -> usize {
        self.avg_start.unwrap_or(self.budget / 10)
    }

    pub fn seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }
}
