use std::io::{Read, Write};

use super::rng::SimRng;
use super::{FiniteGaussianHmm, InitialDistribution, LgssmParams};
use crate::error::{Error, Result};
use crate::io::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub enum HiddenStates {
    /// Zero-based state indices of a finite chain.
    Discrete(Vec<usize>),
    Continuous(Vec<f64>),
}

impl HiddenStates {
    pub fn len(&self) -> usize {
        match self {
            Self::Discrete(v) => v.len(),
            Self::Continuous(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A synthetic stream `(X_t, Y_t)` for `t = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPath {
    pub states: HiddenStates,
    pub observations: Vec<f64>,
    pub seed: u64,
}

impl SimulatedPath {
    /// Writes the `t,x,y` CSV. Finite paths put the zero-based state index in `x`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "y"])?;
        for (t, y) in self.observations.iter().enumerate() {
            let x = match &self.states {
                HiddenStates::Discrete(s) => s[t].to_string(),
                HiddenStates::Continuous(s) => fmt_f64(s[t]),
            };
            w.write_record([t.to_string(), x, fmt_f64(*y)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads the `y` column of a `t,x,y` CSV.
pub fn read_observations_csv<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let y_col = headers
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| Error::Parse("missing `y` column".into()))?;
    let mut ys = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = rec.get(y_col).unwrap_or("");
        let y: f64 = field
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad observation {field:?}", line + 1)))?;
        ys.push(y);
    }
    Ok(ys)
}

/// Draws `X_0 ~ chi`, `X_{t+1} ~ trans(X_t, .)`, `Y_t = x_{X_t} + N(0, var)`.
///
/// Per time step the stream consumes one uniform for the state, then one
/// normal for the observation.
pub fn simulate_finite(
    model: &FiniteGaussianHmm,
    chi: &InitialDistribution,
    n: usize,
    seed: u64,
) -> Result<SimulatedPath> {
    if n < 1 {
        return Err(Error::InvalidLength(n));
    }
    model.validate()?;
    chi.validate()?;
    let chi = chi.expect_discrete(model.d())?;
    let mut rng = SimRng::new(seed);
    let mut states = Vec::with_capacity(n);
    let mut observations = Vec::with_capacity(n);
    let mut x = rng.categorical(chi);
    for t in 0..n {
        if t > 0 {
            x = rng.categorical(model.trans_row(x));
        }
        states.push(x);
        observations.push(rng.normal(model.states()[x], model.var()));
    }
    Ok(SimulatedPath {
        states: HiddenStates::Discrete(states),
        observations,
        seed,
    })
}

/// Draws `X_0` from the stationary law, then alternates observation and state noise.
pub fn simulate_lgssm(model: &LgssmParams, n: usize, seed: u64) -> Result<SimulatedPath> {
    if n < 1 {
        return Err(Error::InvalidLength(n));
    }
    model.validate()?;
    let mut rng = SimRng::new(seed);
    let mut states = Vec::with_capacity(n);
    let mut observations = Vec::with_capacity(n);
    let mut x = rng.normal(0.0, model.stationary_var());
    let (su, sv) = (model.var_u().sqrt(), model.var_v().sqrt());
    for t in 0..n {
        if t > 0 {
            x = model.phi() * x + su * rng.standard_normal();
        }
        states.push(x);
        observations.push(x + sv * rng.standard_normal());
    }
    Ok(SimulatedPath {
        states: HiddenStates::Continuous(states),
        observations,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> FiniteGaussianHmm {
        FiniteGaussianHmm::new(vec![-1.0, 2.0], vec![vec![0.9, 0.1], vec![0.3, 0.7]], 0.5).unwrap()
    }

    #[test]
    fn finite_is_deterministic() {
        let m = two_state();
        let chi = InitialDistribution::uniform(2);
        let a = simulate_finite(&m, &chi, 500, 11).unwrap();
        let b = simulate_finite(&m, &chi, 500, 11).unwrap();
        assert_eq!(a, b);
        let c = simulate_finite(&m, &chi, 500, 12).unwrap();
        assert_ne!(a.observations, c.observations);
    }

    #[test]
    fn zero_length_rejected() {
        let m = two_state();
        assert_eq!(
            simulate_finite(&m, &InitialDistribution::uniform(2), 0, 1),
            Err(Error::InvalidLength(0))
        );
        let p = LgssmParams::new(0.5, 1.0, 1.0).unwrap();
        assert_eq!(simulate_lgssm(&p, 0, 1), Err(Error::InvalidLength(0)));
    }

    #[test]
    fn single_state_gives_iid_noise() {
        let m = FiniteGaussianHmm::new(vec![0.0], vec![vec![1.0]], 2.0).unwrap();
        let path = simulate_finite(&m, &InitialDistribution::uniform(1), 50_000, 5).unwrap();
        let n = path.observations.len() as f64;
        let mean = path.observations.iter().sum::<f64>() / n;
        let var = path.observations.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.03);
        assert!((var - 2.0).abs() < 0.05);
        let lag1 = path.observations.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / n;
        assert!(lag1.abs() < 0.05, "lag-one product {lag1}");
    }

    #[test]
    fn lgssm_without_autoregression_is_iid() {
        let p = LgssmParams::new(0.0, 1.5, 1.0).unwrap();
        let path = simulate_lgssm(&p, 50_000, 9).unwrap();
        let HiddenStates::Continuous(xs) = &path.states else { panic!() };
        let n = xs.len() as f64;
        let var = xs.iter().map(|x| x * x).sum::<f64>() / n;
        let lag1 = xs.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / n;
        assert!((var - 1.5).abs() < 0.05);
        assert!(lag1.abs() < 0.04);
        assert_eq!(simulate_lgssm(&p, 100, 9).unwrap(), simulate_lgssm(&p, 100, 9).unwrap());
    }

    #[test]
    fn csv_round_trip() {
        let m = two_state();
        let path = simulate_finite(&m, &InitialDistribution::uniform(2), 40, 3).unwrap();
        let mut buf = Vec::new();
        path.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,x,y\n"));
        assert_eq!(read_observations_csv(buf.as_slice()).unwrap(), path.observations);
    }

    #[test]
    fn csv_missing_column() {
        assert!(matches!(read_observations_csv("t,x\n0,1\n".as_bytes()), Err(Error::Parse(_))));
    }
}
