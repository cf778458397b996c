use crate::error::{Error, Result};
use crate::estimators::EstimatorTrajectory;
use crate::numeric::linear_fit;

#[derive(Debug, Clone, PartialEq)]
pub struct RateOptions {
    /// Checkpoints below this count are ignored (transient phase).
    pub min_n_obs: usize,
    /// Required decades between the first and last checkpoint used.
    pub min_decades: f64,
    /// Final RMSE above this means the runs have not converged.
    pub max_final_rmse: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            min_n_obs: 1,
            min_decades: 1.5,
            max_final_rmse: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub slope: f64,
    pub std_err: f64,
    /// `(n_obs, rmse)` points of the fit.
    pub points: Vec<(usize, f64)>,
}

/// Least-squares slope of `log RMSE` against `log n_obs`, where the RMSE of
/// `param` around `theta_star` is taken across trajectories at each shared
/// checkpoint.
pub fn rate_slope(
    trajectories: &[&EstimatorTrajectory],
    theta_star: f64,
    param: &str,
    opts: &RateOptions,
) -> Result<RateEstimate> {
    let first = trajectories
        .first()
        .ok_or_else(|| Error::InsufficientSpan("no trajectories".into()))?;
    let mut points = Vec::new();
    for ck in first.checkpoints.iter().filter(|c| c.n_obs >= opts.min_n_obs.max(1)) {
        let mut sq = 0.0;
        for t in trajectories {
            let v = t
                .value_at(ck.n_obs, param)
                .ok_or_else(|| Error::InvalidConfig(format!("checkpoint {} or parameter {param:?} missing", ck.n_obs)))?;
            sq += (v - theta_star).powi(2);
        }
        points.push((ck.n_obs, (sq / trajectories.len() as f64).sqrt()));
    }
    if points.len() < 3 {
        return Err(Error::InsufficientSpan(format!("{} checkpoints, need 3", points.len())));
    }
    let decades = (points[points.len() - 1].0 as f64 / points[0].0 as f64).log10();
    if decades < opts.min_decades {
        return Err(Error::InsufficientSpan(format!(
            "{decades:.2} decades, need {}",
            opts.min_decades
        )));
    }
    let final_rmse = points[points.len() - 1].1;
    if !(final_rmse <= opts.max_final_rmse) {
        return Err(Error::NotConverged {
            rmse: final_rmse,
            bound: opts.max_final_rmse,
        });
    }
    let x: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&x, &y);
    Ok(RateEstimate {
        slope: fit.slope,
        std_err: fit.slope_std_err,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{Algorithm, Checkpoint};

    fn power_law(ks: &[usize], exponent: f64, sign: f64) -> EstimatorTrajectory {
        EstimatorTrajectory {
            algorithm: Algorithm::Boem,
            param_names: vec!["phi".into()],
            checkpoints: ks
                .iter()
                .map(|&k| Checkpoint {
                    n_obs: k,
                    values: vec![0.9 + sign * (k as f64).powf(-exponent)],
                })
                .collect(),
        }
    }

    #[test]
    fn recovers_exact_power_law() {
        let ks = [10, 100, 1000, 10_000, 100_000];
        let a = power_law(&ks, 0.5, 1.0);
        let b = power_law(&ks, 0.5, -1.0);
        let est = rate_slope(&[&a, &b], 0.9, "phi", &RateOptions::default()).unwrap();
        assert!((est.slope + 0.5).abs() < 1e-12, "{}", est.slope);
    }

    #[test]
    fn span_and_convergence_checks() {
        let a = power_law(&[10, 20, 40], 0.5, 1.0);
        assert!(matches!(
            rate_slope(&[&a], 0.9, "phi", &RateOptions::default()),
            Err(Error::InsufficientSpan(_))
        ));
        let a = power_law(&[10, 1000], 0.5, 1.0);
        assert!(matches!(
            rate_slope(&[&a], 0.9, "phi", &RateOptions::default()),
            Err(Error::InsufficientSpan(_))
        ));
        let a = power_law(&[10, 100, 1000], 0.5, 1.0);
        let opts = RateOptions {
            max_final_rmse: 1e-3,
            ..RateOptions::default()
        };
        assert!(matches!(rate_slope(&[&a], 0.9, "phi", &opts), Err(Error::NotConverged { .. })));
    }
}
