use super::stats::{BlockStatistics, SufficientStatistic};
use crate::error::{Error, Result};
use crate::models::InitialDistribution;

/// For each block length `tau`, the max-norm distance between the block
/// statistics of `observations[..tau]` started from `chi1` and from `chi2`.
///
/// A diagnostic of how quickly the smoother forgets its initial law.
pub fn forgetting_gap<M: BlockStatistics>(
    theta: &M,
    chi1: &InitialDistribution,
    chi2: &InitialDistribution,
    observations: &[f64],
    taus: &[usize],
) -> Result<Vec<f64>> {
    taus.iter()
        .map(|&tau| {
            let block = observations.get(..tau).ok_or(Error::StreamExhausted {
                needed: tau,
                available: observations.len(),
            })?;
            let a = theta.block_stats(chi1, block)?.stat;
            let b = theta.block_stats(chi2, block)?.stat;
            Ok(a.as_slice()
                .iter()
                .zip(b.as_slice())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{simulate_finite, FiniteGaussianHmm};

    #[test]
    fn identical_initial_laws_give_zero_gap() {
        let theta = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![0.7, 0.3], vec![0.2, 0.8]], 0.5).unwrap();
        let chi = InitialDistribution::discrete(vec![0.9, 0.1]).unwrap();
        let path = simulate_finite(&theta, &chi, 100, 4).unwrap();
        let gaps = forgetting_gap(&theta, &chi, &chi, &path.observations, &[1, 10, 100]).unwrap();
        assert_eq!(gaps, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn short_stream_is_reported() {
        let theta = FiniteGaussianHmm::new(vec![0.0, 1.0], vec![vec![0.5, 0.5]; 2], 1.0).unwrap();
        let chi = InitialDistribution::uniform(2);
        let err = forgetting_gap(&theta, &chi, &chi, &[0.0; 5], &[6]).unwrap_err();
        assert_eq!(err, Error::StreamExhausted { needed: 6, available: 5 });
    }
}
