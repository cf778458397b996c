//! Closed-form maximizers of the expected complete-data log-likelihood.
//!
//! For a statistic `s`, the objective is the block-averaged complete-data
//! log-likelihood with every sufficient statistic replaced by its value in
//! `s`. Both families have a unique maximizer in closed form; the parameter
//! set is a box (see [`ParamBounds`]) and the maximizer is projected onto it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::{FiniteGaussianHmm, LgssmParams};
use crate::smoothing::{FiniteStatistic, LgssmStatistic};

/// Compact parameter box and degeneracy thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBounds {
    pub var_min: f64,
    pub var_max: f64,
    /// `|phi| <= phi_max`.
    pub phi_max: f64,
    /// Transition entries are floored here, then rows renormalized.
    pub trans_floor: f64,
    /// Smaller state occupancy is treated as an unvisited state.
    pub occupancy_eps: f64,
    /// Smaller raw variance estimates are reported as degenerate.
    pub variance_eps: f64,
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self {
            var_min: 1e-6,
            var_max: 1e6,
            phi_max: 1.0 - 1e-6,
            trans_floor: 1e-8,
            occupancy_eps: 1e-12,
            variance_eps: 1e-10,
        }
    }
}

impl ParamBounds {
    fn clamp_var(&self, v: f64) -> Result<f64> {
        if !(v >= self.variance_eps) {
            return Err(Error::DegenerateVariance(v));
        }
        Ok(v.clamp(self.var_min, self.var_max))
    }
}

/// `m_ij = spair_ij / sum_j spair_ij`, `x_i = s1_i / s0_i`,
/// `v = sum s2_i + sum x_i^2 s0_i - 2 sum x_i s1_i`.
pub fn mstep_finite(s: &FiniteStatistic, bounds: &ParamBounds) -> Result<FiniteGaussianHmm> {
    finite_update(s, bounds, None, None, None)
}

/// Parameter groups of the finite model that can be held fixed.
pub const FINITE_GROUPS: [&str; 3] = ["v", "x", "m"];

/// M-step over the groups not listed in `fixed`, which keep their value in
/// `current`. The objective separates into a transition part and an
/// emission part, and `v` is maximized given the (possibly fixed) levels,
/// so the result is the exact constrained maximizer.
pub fn mstep_finite_partial(
    s: &FiniteStatistic,
    bounds: &ParamBounds,
    current: &FiniteGaussianHmm,
    fixed: &[String],
) -> Result<FiniteGaussianHmm> {
    check_groups(&FINITE_GROUPS, fixed)?;
    let has = |g: &str| fixed.iter().any(|f| f == g);
    finite_update(
        s,
        bounds,
        has("x").then(|| current.states()),
        has("v").then(|| current.var()),
        has("m").then(|| current.trans_flat()),
    )
}

fn finite_update(
    s: &FiniteStatistic,
    bounds: &ParamBounds,
    states: Option<&[f64]>,
    var: Option<f64>,
    trans: Option<&[f64]>,
) -> Result<FiniteGaussianHmm> {
    let d = s.d();
    let states = match states {
        Some(x) => x.to_vec(),
        None => {
            let mut states = Vec::with_capacity(d);
            for (i, (&occ, &first)) in s.s0().iter().zip(s.s1()).enumerate() {
                if !(occ >= bounds.occupancy_eps) {
                    return Err(Error::DegenerateState { state: i, occupancy: occ });
                }
                states.push(first / occ);
            }
            states
        }
    };
    let v = match var {
        Some(v) => v,
        None => {
            let mut v = 0.0;
            for i in 0..d {
                let x = states[i];
                v += s.s2()[i] + x * x * s.s0()[i] - 2.0 * x * s.s1()[i];
            }
            bounds.clamp_var(v)?
        }
    };
    let trans = match trans {
        Some(m) => m.to_vec(),
        None => {
            let mut trans = Vec::with_capacity(d * d);
            for i in 0..d {
                let row = &s.spair()[i * d..(i + 1) * d];
                let total: f64 = row.iter().sum();
                if !(total >= bounds.occupancy_eps) {
                    return Err(Error::DegenerateState { state: i, occupancy: total });
                }
                let floored: Vec<f64> = row.iter().map(|p| (p / total).max(bounds.trans_floor)).collect();
                let norm: f64 = floored.iter().sum();
                trans.extend(floored.into_iter().map(|p| p / norm));
            }
            trans
        }
    };
    FiniteGaussianHmm::from_flat(states, trans, v)
}

fn check_groups(groups: &[&str], fixed: &[String]) -> Result<()> {
    match fixed.iter().find(|f| !groups.contains(&f.as_str())) {
        Some(bad) => Err(Error::InvalidConfig(format!(
            "unknown parameter group {bad:?} (expected one of {})",
            groups.join(", ")
        ))),
        None => Ok(()),
    }
}

/// `phi = m_cross / m_prev2` clamped into the box,
/// `var_u = m_cur2 - 2 phi m_cross + phi^2 m_prev2`,
/// `var_v = m_y2 - 2 m_xy + m_cur2`.
///
/// `var_u` is evaluated at the clamped `phi`; without clamping it equals
/// `m_cur2 - m_cross^2 / m_prev2`.
pub fn mstep_lgssm(s: &LgssmStatistic, bounds: &ParamBounds) -> Result<LgssmParams> {
    lgssm_update(s, bounds, None, None, None)
}

/// Parameter groups of the linear model that can be held fixed.
pub const LGSSM_GROUPS: [&str; 3] = ["phi", "var_u", "var_v"];

/// M-step over the parameters not listed in `fixed`; `var_u` is maximized
/// at the (possibly fixed) `phi`.
pub fn mstep_lgssm_partial(
    s: &LgssmStatistic,
    bounds: &ParamBounds,
    current: &LgssmParams,
    fixed: &[String],
) -> Result<LgssmParams> {
    check_groups(&LGSSM_GROUPS, fixed)?;
    let has = |g: &str| fixed.iter().any(|f| f == g);
    lgssm_update(
        s,
        bounds,
        has("phi").then(|| current.phi()),
        has("var_u").then(|| current.var_u()),
        has("var_v").then(|| current.var_v()),
    )
}

fn lgssm_update(
    s: &LgssmStatistic,
    bounds: &ParamBounds,
    phi: Option<f64>,
    var_u: Option<f64>,
    var_v: Option<f64>,
) -> Result<LgssmParams> {
    let phi = match phi {
        Some(phi) => phi,
        None => {
            if !(s.m_prev2() > 0.0) {
                return Err(Error::DegenerateVariance(s.m_prev2()));
            }
            (s.m_cross() / s.m_prev2()).clamp(-bounds.phi_max, bounds.phi_max)
        }
    };
    let var_u = match var_u {
        Some(q) => q,
        None => bounds.clamp_var(s.m_cur2() - 2.0 * phi * s.m_cross() + phi * phi * s.m_prev2())?,
    };
    let var_v = match var_v {
        Some(r) => r,
        None => bounds.clamp_var(s.m_y2() - 2.0 * s.m_xy() + s.m_cur2())?,
    };
    LgssmParams::new(phi, var_u, var_v)
}

/// Expected complete-data log-likelihood per observation of the finite model
/// under statistic `s`.
pub fn complete_data_objective_finite(theta: &FiniteGaussianHmm, s: &FiniteStatistic) -> f64 {
    let d = theta.d();
    let v = theta.var();
    let mut obj = 0.0;
    for i in 0..d {
        for j in 0..d {
            let p = s.spair_at(i, j);
            if p != 0.0 {
                obj += p * theta.trans(i, j).ln();
            }
        }
        let x = theta.states()[i];
        obj -= 0.5 * s.s0()[i] * (2.0 * PI * v).ln();
        obj -= (s.s2()[i] - 2.0 * x * s.s1()[i] + x * x * s.s0()[i]) / (2.0 * v);
    }
    obj
}

/// Expected complete-data log-likelihood per observation of the linear model.
pub fn complete_data_objective_lgssm(theta: &LgssmParams, s: &LgssmStatistic) -> f64 {
    let (phi, q, r) = (theta.phi(), theta.var_u(), theta.var_v());
    let state = s.m_cur2() - 2.0 * phi * s.m_cross() + phi * phi * s.m_prev2();
    let obs = s.m_y2() - 2.0 * s.m_xy() + s.m_cur2();
    -0.5 * (2.0 * PI * q).ln() - state / (2.0 * q) - 0.5 * (2.0 * PI * r).ln() - obs / (2.0 * r)
}
