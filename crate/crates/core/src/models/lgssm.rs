use crate::error::{Error, Result};

/// Scalar AR(1) state observed in Gaussian noise:
/// `X_{t+1} = phi X_t + sqrt(var_u) U_t`, `Y_t = X_t + sqrt(var_v) V_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgssmParams {
    phi: f64,
    var_u: f64,
    var_v: f64,
}

impl LgssmParams {
    pub fn new(phi: f64, var_u: f64, var_v: f64) -> Result<Self> {
        let p = Self { phi, var_u, var_v };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "|phi| must be < 1 for stationarity, got {}",
                self.phi
            )));
        }
        for v in [self.var_u, self.var_v] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveVariance(v));
            }
        }
        Ok(())
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn var_u(&self) -> f64 {
        self.var_u
    }

    pub fn var_v(&self) -> f64 {
        self.var_v
    }

    /// Variance of the stationary state law, `var_u / (1 - phi^2)`.
    pub fn stationary_var(&self) -> f64 {
        self.var_u / (1.0 - self.phi * self.phi)
    }

    pub fn param_names() -> Vec<String> {
        vec!["phi".into(), "var_u".into(), "var_v".into()]
    }

    pub fn param_values(&self) -> Vec<f64> {
        vec![self.phi, self.var_u, self.var_v]
    }

    pub fn from_param_values(values: &[f64]) -> Result<Self> {
        match values {
            [phi, u, v] => Self::new(*phi, *u, *v),
            _ => Err(Error::DimensionMismatch(format!(
                "expected 3 parameter values, got {}",
                values.len()
            ))),
        }
    }
}
