use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Row sums of a transition matrix must be within this of 1.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Hidden Markov chain on `d` real levels observed in additive Gaussian noise:
/// `Y_t = x_{X_t} + N(0, var)`.
///
/// Immutable once built; [`FiniteGaussianHmm::new`] enforces that `trans`
/// is row-stochastic and `var` is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGaussianHmm {
    states: Vec<f64>,
    /// Row-major `d x d`.
    trans: Vec<f64>,
    var: f64,
}

impl FiniteGaussianHmm {
    pub fn new(states: Vec<f64>, trans: Vec<Vec<f64>>, var: f64) -> Result<Self> {
        let d = states.len();
        if trans.len() != d || trans.iter().any(|row| row.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "{d} states but transition matrix is {}x{}",
                trans.len(),
                trans.first().map_or(0, Vec::len)
            )));
        }
        let model = Self {
            states,
            trans: trans.into_iter().flatten().collect(),
            var,
        };
        model.validate()?;
        Ok(model)
    }

    /// Builds from a flat row-major transition matrix.
    pub fn from_flat(states: Vec<f64>, trans: Vec<f64>, var: f64) -> Result<Self> {
        let d = states.len();
        if trans.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "{d} states need {} transition entries, got {}",
                d * d,
                trans.len()
            )));
        }
        let model = Self { states, trans, var };
        model.validate()?;
        Ok(model)
    }

    /// Checks every structural invariant of the model.
    pub fn validate(&self) -> Result<()> {
        let d = self.states.len();
        if d == 0 {
            return Err(Error::DimensionMismatch("model has no states".into()));
        }
        if self.trans.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "transition matrix has {} entries for {d} states",
                self.trans.len()
            )));
        }
        if self.states.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("state levels must be finite".into()));
        }
        for row in 0..d {
            let r = &self.trans[row * d..(row + 1) * d];
            let sum: f64 = r.iter().sum();
            let min = r.iter().copied().fold(f64::INFINITY, f64::min);
            if !(min >= 0.0) || !((sum - 1.0).abs() <= STOCHASTIC_TOL) {
                return Err(Error::NonStochasticRow { row, sum, min });
            }
        }
        if !(self.var > 0.0) || !self.var.is_finite() {
            return Err(Error::NonPositiveVariance(self.var));
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn var(&self) -> f64 {
        self.var
    }

    #[inline]
    pub fn trans(&self, from: usize, to: usize) -> f64 {
        self.trans[from * self.d() + to]
    }

    pub fn trans_row(&self, from: usize) -> &[f64] {
        let d = self.d();
        &self.trans[from * d..(from + 1) * d]
    }

    pub fn trans_flat(&self) -> &[f64] {
        &self.trans
    }

    /// Gaussian emission density `g(x_i, y)` on the linear scale.
    pub fn emission_density(&self, state: usize, y: f64) -> Result<f64> {
        self.check_index(state)?;
        Ok(self.log_emission(state, y).exp())
    }

    /// `log g(x_i, y)`. Used by the filters so that long blocks never underflow.
    #[inline]
    pub fn log_emission(&self, state: usize, y: f64) -> f64 {
        let r = y - self.states[state];
        -0.5 * (2.0 * PI * self.var).ln() - r * r / (2.0 * self.var)
    }

    fn check_index(&self, state: usize) -> Result<()> {
        if state >= self.d() {
            return Err(Error::IndexOutOfRange {
                index: state,
                d: self.d(),
            });
        }
        Ok(())
    }

    /// Parameter names in the order of [`Self::param_values`]:
    /// `v`, `x1..xd`, then `m{i}_{j}` row-major (1-based).
    pub fn param_names(d: usize) -> Vec<String> {
        let mut names = Vec::with_capacity(1 + d + d * d);
        names.push("v".to_string());
        names.extend((1..=d).map(|i| format!("x{i}")));
        for i in 1..=d {
            for j in 1..=d {
                names.push(format!("m{i}_{j}"));
            }
        }
        names
    }

    pub fn param_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(1 + self.d() + self.trans.len());
        out.push(self.var);
        out.extend_from_slice(&self.states);
        out.extend_from_slice(&self.trans);
        out
    }

    /// Inverse of [`Self::param_values`].
    pub fn from_param_values(d: usize, values: &[f64]) -> Result<Self> {
        if values.len() != 1 + d + d * d {
            return Err(Error::DimensionMismatch(format!(
                "expected {} parameter values for d={d}, got {}",
                1 + d + d * d,
                values.len()
            )));
        }
        Self::from_flat(values[1..=d].to_vec(), values[1 + d..].to_vec(), values[0])
    }
}

/// Runs [`FiniteGaussianHmm::validate`].
pub fn validate_finite_hmm(model: &FiniteGaussianHmm) -> Result<()> {
    model.validate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn six_state_matrix() -> Vec<Vec<f64>> {
        vec![
            vec![0.5, 0.05, 0.1, 0.15, 0.15, 0.05],
            vec![0.2, 0.35, 0.1, 0.15, 0.05, 0.15],
            vec![0.1, 0.1, 0.6, 0.05, 0.05, 0.1],
            vec![0.02, 0.03, 0.1, 0.7, 0.1, 0.05],
            vec![0.1, 0.05, 0.13, 0.02, 0.6, 0.1],
            vec![0.1, 0.1, 0.13, 0.12, 0.1, 0.45],
        ]
    }

    #[test]
    fn accepts_six_state_matrix() {
        let m = FiniteGaussianHmm::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], six_state_matrix(), 1.0);
        assert!(m.is_ok(), "{m:?}");
    }

    #[test]
    fn rejects_row_summing_above_one() {
        let err = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![0.5, 0.6], vec![0.5, 0.5]], 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::NonStochasticRow { row: 0, .. }));
    }

    #[test]
    fn rejects_negative_entry() {
        let err = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![1.1, -0.1], vec![0.5, 0.5]], 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::NonStochasticRow { .. }));
    }

    #[test]
    fn rejects_zero_variance() {
        let err = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![0.5, 0.5]; 2], 0.0).unwrap_err();
        assert_eq!(err, Error::NonPositiveVariance(0.0));
    }

    #[test]
    fn rejects_shape_mismatch() {
        let err = FiniteGaussianHmm::new(vec![0.0, 1.0, 2.0], vec![vec![0.5, 0.5]; 2], 1.0).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn density_at_mode() {
        let m = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![0.5, 0.5]; 2], 1.0).unwrap();
        assert_relative_eq!(m.emission_density(0, 0.0).unwrap(), 0.398_942_280_401_432_7, epsilon = 1e-15);
        assert!(m.emission_density(0, 1e3).unwrap() < 1e-300);
        assert!(m.emission_density(0, -1e3).unwrap() < 1e-300);
        assert!(matches!(m.emission_density(2, 0.0), Err(Error::IndexOutOfRange { index: 2, d: 2 })));
    }

    #[test]
    fn density_matches_direct_formula() {
        let m = FiniteGaussianHmm::new(vec![3.0, 0.0], vec![vec![0.5, 0.5]; 2], 2.0).unwrap();
        // N(3, 2) at 4, written out independently.
        let expected = (-(4.0f64 - 3.0).powi(2) / 4.0).exp() / (4.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(m.emission_density(0, 4.0).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn density_integrates_to_one() {
        let m = FiniteGaussianHmm::new(vec![0.7, 0.0], vec![vec![0.5, 0.5]; 2], 1.7).unwrap();
        // Composite Simpson over +-20 standard deviations.
        let (lo, hi, n) = (0.7 - 27.0, 0.7 + 27.0, 20_000);
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for k in 0..=n {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * m.emission_density(0, lo + k as f64 * h).unwrap();
        }
        assert!((acc * h / 3.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn param_values_round_trip() {
        let m = FiniteGaussianHmm::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], six_state_matrix(), 1.3).unwrap();
        let back = FiniteGaussianHmm::from_param_values(6, &m.param_values()).unwrap();
        assert_eq!(m, back);
        assert_eq!(FiniteGaussianHmm::param_names(6).len(), m.param_values().len());
        assert_eq!(FiniteGaussianHmm::param_names(2)[3], "m1_1");
    }
}
