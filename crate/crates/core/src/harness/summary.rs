use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::estimators::EstimatorTrajectory;
use crate::io::fmt_f64;
use crate::numeric::{quantile_sorted, sample_variance};

pub const SUMMARY_HEADER: [&str; 7] = ["algorithm", "n_obs", "param", "median", "q1", "q3", "variance"];

/// Across-run spread of one parameter at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub n_obs: usize,
    pub param: String,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub variance: f64,
}

impl SummaryRow {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    /// Summarizes trajectories grouped by label. Each group holds one
    /// trajectory per run; quartiles are type-7.
    pub fn from_groups(groups: &[(String, Vec<&EstimatorTrajectory>)], params: Option<&[String]>) -> Self {
        let mut rows = Vec::new();
        for (label, trajs) in groups {
            let Some(first) = trajs.first() else { continue };
            let selected: Vec<(usize, &String)> = first
                .param_names
                .iter()
                .enumerate()
                .filter(|(_, p)| params.is_none_or(|ps| ps.contains(p)))
                .collect();
            for (ci, ck) in first.checkpoints.iter().enumerate() {
                for &(pi, name) in &selected {
                    let mut values: Vec<f64> = trajs
                        .iter()
                        .filter_map(|t| t.checkpoints.get(ci).filter(|c| c.n_obs == ck.n_obs))
                        .map(|c| c.values[pi])
                        .collect();
                    values.sort_by(f64::total_cmp);
                    rows.push(SummaryRow {
                        algorithm: label.clone(),
                        n_obs: ck.n_obs,
                        param: name.clone(),
                        median: quantile_sorted(&values, 0.5),
                        q1: quantile_sorted(&values, 0.25),
                        q3: quantile_sorted(&values, 0.75),
                        variance: sample_variance(&values),
                    });
                }
            }
        }
        Self { rows }
    }

    pub fn get(&self, algorithm: &str, n_obs: usize, param: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.n_obs == n_obs && r.param == param)
    }

    /// Row at the largest checkpoint for this algorithm and parameter.
    pub fn last(&self, algorithm: &str, param: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.param == param)
            .max_by_key(|r| r.n_obs)
    }

    pub fn extend(&mut self, other: SummaryTable) {
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SUMMARY_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.algorithm.clone(),
                r.n_obs.to_string(),
                r.param.clone(),
                fmt_f64(r.median),
                fmt_f64(r.q1),
                fmt_f64(r.q3),
                fmt_f64(r.variance),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        if r.headers()?.iter().ne(SUMMARY_HEADER) {
            return Err(Error::Parse("unexpected summary header".into()));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| Error::Parse(format!("bad number {:?}", &rec[i])))
            };
            rows.push(SummaryRow {
                algorithm: rec[0].to_string(),
                n_obs: rec[1].parse().map_err(|_| Error::Parse(format!("bad count {:?}", &rec[1])))?,
                param: rec[2].to_string(),
                median: num(3)?,
                q1: num(4)?,
                q3: num(5)?,
                variance: num(6)?,
            });
        }
        Ok(Self { rows })
    }
}

pub const TRAJECTORY_HEADER: [&str; 5] = ["run_id", "n_obs", "param", "estimate", "algorithm"];

/// Long-format trajectory CSV, one row per (run, checkpoint, parameter).
pub fn write_trajectories_csv<W: Write>(out: W, runs: &[(usize, &EstimatorTrajectory)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for (run_id, traj) in runs {
        for ck in &traj.checkpoints {
            for (name, v) in traj.param_names.iter().zip(&ck.values) {
                w.write_record([
                    run_id.to_string(),
                    ck.n_obs.to_string(),
                    name.clone(),
                    fmt_f64(*v),
                    traj.algorithm.label().to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One parsed trajectory row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub run_id: usize,
    pub n_obs: usize,
    pub param: String,
    pub estimate: f64,
    pub algorithm: String,
}

pub fn read_trajectories_csv<R: Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(TRAJECTORY_HEADER) {
        return Err(Error::Parse("unexpected trajectory header".into()));
    }
    let bad = |s: &str| Error::Parse(format!("bad field {s:?}"));
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(TrajectoryRow {
                run_id: rec[0].parse().map_err(|_| bad(&rec[0]))?,
                n_obs: rec[1].parse().map_err(|_| bad(&rec[1]))?,
                param: rec[2].to_string(),
                estimate: rec[3].parse().map_err(|_| bad(&rec[3]))?,
                algorithm: rec[4].to_string(),
            })
        })
        .collect()
}

/// Groups per-run trajectories by algorithm label, preserving run order.
pub fn group_by_algorithm<'a>(runs: impl IntoIterator<Item = &'a EstimatorTrajectory>) -> Vec<(String, Vec<&'a EstimatorTrajectory>)> {
    let mut map: BTreeMap<_, Vec<&EstimatorTrajectory>> = BTreeMap::new();
    for t in runs {
        map.entry(t.algorithm).or_default().push(t);
    }
    map.into_iter().map(|(a, ts)| (a.label().to_string(), ts)).collect()
}
