use super::family::ModelFamily;
use super::mstep::ParamBounds;
use crate::error::Result;
use crate::models::InitialDistribution;

/// One EM iteration on a fixed block: `M(S(theta, chi, block))`.
pub fn batch_em_step<M: ModelFamily>(
    theta: &M,
    chi: &InitialDistribution,
    block: &[f64],
    bounds: &ParamBounds,
) -> Result<M> {
    M::m_step(&theta.block_stats(chi, block)?.stat, bounds)
}

/// Iterates [`batch_em_step`] and returns the block log-likelihood of every
/// iterate, starting with `theta0`'s.
pub fn batch_em<M: ModelFamily>(
    theta0: &M,
    chi: &InitialDistribution,
    block: &[f64],
    iterations: usize,
    bounds: &ParamBounds,
) -> Result<(M, Vec<f64>)> {
    let mut theta = theta0.clone();
    let mut lls = Vec::with_capacity(iterations + 1);
    for _ in 0..iterations {
        let out = theta.block_stats(chi, block)?;
        lls.push(out.log_likelihood);
        theta = M::m_step(&out.stat, bounds)?;
    }
    lls.push(theta.block_stats(chi, block)?.log_likelihood);
    Ok((theta, lls))
}
