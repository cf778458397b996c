use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use boem::harness::{
    fit_observations, presets, rate_slope, run_experiment, run_single, simulate_truth, variance_vs_schedule,
    write_trajectories_csv, ExperimentConfig, ExperimentResult, FamilySpec, RateOptions, SummaryTable,
};
use boem::io::fmt_f64;
use boem::models::read_observations_csv;
use boem::{Algorithm, BlockSchedule, ChiPolicy, Error};

use crate::settings::{usage, CliResult, Settings};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Lgssm,
    FiniteLevels,
    FiniteTransitions,
}

impl Model {
    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "lgssm" => Ok(Model::Lgssm),
            "finite" | "finite-levels" => Ok(Model::FiniteLevels),
            "finite-transitions" => Ok(Model::FiniteTransitions),
            _ => Err(usage(format!(
                "--model: unknown model {s:?} (lgssm, finite, finite-levels, finite-transitions)"
            ))),
        }
    }

    fn family(self) -> FamilySpec {
        match self {
            Model::Lgssm => FamilySpec::Lgssm {
                truth: presets::lgssm_truth(),
                init: presets::lgssm_start(),
            },
            Model::FiniteLevels => FamilySpec::Finite {
                truth: presets::six_state_truth(),
                init: presets::six_state_levels_start(),
            },
            Model::FiniteTransitions => FamilySpec::Finite {
                truth: presets::six_state_truth(),
                init: presets::six_state_transitions_start(),
            },
        }
    }

    fn default_fix(self) -> &'static str {
        match self {
            Model::Lgssm => "none",
            Model::FiniteLevels => "m",
            Model::FiniteTransitions => "x",
        }
    }

    fn default_burn_in(self) -> usize {
        match self {
            Model::Lgssm => 0,
            _ => boem::estimators::DEFAULT_BURN_IN,
        }
    }

    fn default_params(self) -> &'static str {
        match self {
            Model::Lgssm => "phi",
            Model::FiniteLevels => "v,x1",
            Model::FiniteTransitions => "v,m1_1",
        }
    }
}

fn positive(s: &Settings, key: &str) -> CliResult<usize> {
    match s.parse::<usize>(key)? {
        Some(0) => Err(usage(format!("--{key} must be positive"))),
        Some(v) => Ok(v),
        None => Err(usage(format!("--{key} is required"))),
    }
}

fn seed(s: &Settings) -> CliResult<u64> {
    Ok(s.parse::<u64>("seed")?.expect("seed has a default"))
}

fn out_dir(s: &Settings) -> CliResult<PathBuf> {
    let dir = PathBuf::from(s.raw("out").expect("out has a default"));
    fs::create_dir_all(&dir).map_err(|e| usage(format!("--out: cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn create(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Writes the resolved settings; `notes` become comment lines, so the file
/// can be passed back with `--config`.
fn write_metadata(dir: &Path, command: &str, s: &Settings, notes: &[String]) -> CliResult<()> {
    let mut w = create(dir, "metadata.txt")?;
    writeln!(w, "# boem {} {command}", env!("CARGO_PKG_VERSION"))?;
    for note in notes {
        writeln!(w, "# {note}")?;
    }
    w.write_all(s.to_lines().as_bytes())?;
    w.flush()?;
    Ok(())
}

fn parse_algorithms(s: &Settings) -> CliResult<Vec<Algorithm>> {
    let list = s.list("algo").unwrap_or_default();
    if list.is_empty() {
        return Err(usage("--algo: no algorithm given (boem, boem-avg, oem, oem-avg)"));
    }
    list.iter()
        .map(|a| a.parse::<Algorithm>().map_err(|_| usage(format!("--algo: unknown algorithm {a:?}"))))
        .collect()
}

fn schedule(s: &Settings, default_a: Option<f64>) -> CliResult<Option<BlockSchedule>> {
    let a = match (s.parse::<f64>("a")?, default_a) {
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Ok(None),
    };
    let c: f64 = s.parse_or("c", 1.0)?;
    if !(a > 1.0) {
        return Err(usage(format!("--a must be greater than 1, got {a}")));
    }
    if !(c.floor() >= 1.0) {
        return Err(usage(format!("--c must satisfy floor(c) >= 1, got {c}")));
    }
    BlockSchedule::new(c, a).map(Some).map_err(|e| usage(format!("--a/--c: {e}")))
}

/// Applies the schedule, step, burn-in, averaging, chi, thread and
/// checkpoint settings on top of a preset.
fn apply_overrides(cfg: &mut ExperimentConfig, s: &Settings, model: Model) -> CliResult<()> {
    if let Some(sched) = schedule(s, None)? {
        cfg.schedule = sched;
    }
    if let Some(g) = s.parse::<f64>("gamma-exp")? {
        if !(g > 0.5 && g <= 1.0) {
            return Err(usage(format!("--gamma-exp must lie in (0.5, 1], got {g}")));
        }
        cfg.gamma_exponent = g;
    }
    if let Some(b) = s.parse::<usize>("burn-in")? {
        if b < 1 && cfg.algorithms.iter().any(|a| !a.is_block()) {
            return Err(usage("--burn-in must be at least 1 for online EM"));
        }
        cfg.burn_in = b.max(1);
        cfg.boem_burn_in = b;
    } else {
        cfg.boem_burn_in = model.default_burn_in();
    }
    if let Some(n0) = s.parse::<usize>("avg-start")? {
        cfg.avg_start = Some(n0);
    }
    if let Some(chi) = s.raw("chi") {
        cfg.chi_policy = chi.parse::<ChiPolicy>().map_err(|_| usage(format!("--chi: expected warm or reset, got {chi:?}")))?;
    }
    if let Some(t) = s.parse::<usize>("threads")? {
        if t == 0 {
            return Err(usage("--threads must be positive"));
        }
        cfg.threads = Some(t);
    }
    if let Some(ck) = s.checkpoints(cfg.budget)? {
        cfg.checkpoints = ck;
    }
    Ok(())
}

pub fn simulate(settings: &Settings) -> CliResult<()> {
    let mut s = settings.clone();
    s.set_default("model", "lgssm");
    s.set_default("n", "100000");
    s.set_default("seed", "1");
    s.set_default("out", "boem-out");
    let model = Model::parse(s.raw("model").unwrap())?;
    let n = positive(&s, "n")?;
    let seed = seed(&s)?;
    let dir = out_dir(&s)?;
    let path = simulate_truth(&model.family(), n, seed)?;
    let mut w = create(&dir, "path.csv")?;
    path.write_csv(&mut w)?;
    w.flush()?;
    write_metadata(&dir, "simulate", &s, &[])?;
    println!("wrote {} observations to {}", n, dir.join("path.csv").display());
    Ok(())
}

pub fn fit(settings: &Settings) -> CliResult<()> {
    let mut s = settings.clone();
    s.set_default("model", "lgssm");
    s.set_default("seed", "1");
    s.set_default("out", "boem-out");
    s.set_default("chi", "warm");
    let model = Model::parse(s.raw("model").unwrap())?;
    schedule(&s, None)?;
    let algorithms = parse_algorithms(&s)?;
    let block = algorithms.iter().any(|a| a.is_block());
    let online = algorithms.iter().any(|a| !a.is_block());
    if block {
        s.require("a", "for block EM (boem, boem-avg)")?;
        s.set_default("c", "1");
    }
    if online {
        s.require("gamma-exp", "for online EM (oem, oem-avg)")?;
        if model == Model::Lgssm {
            return Err(usage("--algo: online EM is only available for the finite models"));
        }
    }

    let observations = match s.raw("input") {
        Some(input) => {
            let file = File::open(input).map_err(|e| usage(format!("--input: cannot open {input}: {e}")))?;
            let mut obs = read_observations_csv(file)?;
            if let Some(n) = s.parse::<usize>("n")? {
                if n > obs.len() {
                    return Err(Error::StreamExhausted {
                        needed: n,
                        available: obs.len(),
                    }
                    .into());
                }
                obs.truncate(n);
            }
            s.set_default("n", obs.len().to_string());
            Some(obs)
        }
        None => {
            s.set_default("n", "100000");
            None
        }
    };
    let n = positive(&s, "n")?;
    s.set_default("burn-in", model.default_burn_in().max(if online { 1 } else { 0 }).to_string());
    s.set_default("fix", model.default_fix());
    s.set_default("checkpoints", format!("lin:{}", n.min(20)));
    if online {
        s.set_default("avg-start", (n / 10).to_string());
    }

    let mut cfg = ExperimentConfig {
        algorithms: algorithms.clone(),
        fixed: s.list("fix").unwrap_or_default(),
        ..ExperimentConfig::new(model.family(), 1, n, seed(&s)?)
    };
    apply_overrides(&mut cfg, &s, model)?;
    cfg.validate()?;
    let trajectories = match &observations {
        Some(obs) => fit_observations(&cfg, obs)?,
        None => run_single(&cfg, 0)?,
    };

    let dir = out_dir(&s)?;
    let mut w = create(&dir, "trajectory.csv")?;
    let runs: Vec<_> = trajectories.iter().map(|t| (0, t)).collect();
    write_trajectories_csv(&mut w, &runs)?;
    w.flush()?;
    write_metadata(&dir, "fit", &s, &[])?;
    for t in &trajectories {
        let last = t.last().expect("trajectory has a start point");
        let values: Vec<String> = t
            .param_names
            .iter()
            .zip(&last.values)
            .take(8)
            .map(|(p, v)| format!("{p}={v:.4}"))
            .collect();
        println!("{} after {} obs: {}", t.algorithm, last.n_obs, values.join(" "));
    }
    Ok(())
}

fn report_exclusions(name: &str, res: &ExperimentResult, notes: &mut Vec<String>) {
    notes.push(format!("{name}: excluded_runs={}", res.excluded));
    if res.excluded > 0 {
        eprintln!("warning: {name}: {} of {} runs failed and were excluded", res.excluded, res.runs.len());
        for r in res.runs.iter().filter(|r| r.result.is_err()) {
            if let Err(e) = &r.result {
                eprintln!("  run {} (seed {}): {}: {e}", r.run_id, r.seed, e.code());
            }
        }
    }
}

fn write_summary(dir: &Path, file: &str, table: &SummaryTable) -> CliResult<()> {
    let mut w = create(dir, file)?;
    table.write_csv(&mut w)?;
    w.flush()?;
    println!("wrote {}", dir.join(file).display());
    Ok(())
}

/// Per-experiment settings: user values win, then the experiment's defaults.
fn experiment_settings(user: &Settings, runs: usize, n: usize) -> Settings {
    let mut s = user.clone();
    s.set_default("runs", runs.to_string());
    s.set_default("n", n.to_string());
    s
}

fn experiment_lgm(user: &Settings, dir: &Path, notes: &mut Vec<String>) -> CliResult<()> {
    let s = experiment_settings(user, 20, 100_000);
    let mut cfg = presets::lgssm_convergence(positive(&s, "runs")?, positive(&s, "n")?, seed(&s)?);
    apply_overrides(&mut cfg, &s, Model::Lgssm)?;
    let res = run_experiment(&cfg)?;
    report_exclusions("lgm", &res, notes);
    notes.push(format!("lgm: runs={} n={}", cfg.n_runs, cfg.budget));
    write_summary(dir, "fig1_quantiles.csv", &res.summary)
}

fn experiment_blocksize(user: &Settings, dir: &Path, notes: &mut Vec<String>) -> CliResult<()> {
    if user.has("a") || user.has("c") {
        return Err(usage("--a/--c do not apply to lgm-blocksize, which sweeps the exponent"));
    }
    let s = experiment_settings(user, 20, 100_000);
    let mut cfg = presets::lgssm_block_sizes(positive(&s, "runs")?, positive(&s, "n")?, seed(&s)?);
    apply_overrides(&mut cfg, &s, Model::Lgssm)?;
    let mut table = SummaryTable::default();
    for (a, res) in variance_vs_schedule(&cfg, &presets::BLOCK_SIZE_EXPONENTS)? {
        report_exclusions(&format!("lgm-blocksize a={a}"), &res, notes);
        table.extend(res.summary);
    }
    notes.push(format!("lgm-blocksize: runs={} n={} exponents={:?}", cfg.n_runs, cfg.budget, presets::BLOCK_SIZE_EXPONENTS));
    write_summary(dir, "fig2_variance.csv", &table)
}

fn experiment_finite(user: &Settings, dir: &Path, notes: &mut Vec<String>) -> CliResult<()> {
    let s = experiment_settings(user, 20, 100_000);
    let (runs, n, seed) = (positive(&s, "runs")?, positive(&s, "n")?, seed(&s)?);
    for (model, cfg, file) in [
        (Model::FiniteLevels, presets::six_state_levels(runs, n, seed), "fig3_quantiles.csv"),
        (Model::FiniteTransitions, presets::six_state_transitions_study(runs, n, seed), "fig5_quantiles.csv"),
    ] {
        let mut cfg = cfg;
        apply_overrides(&mut cfg, &s, model)?;
        let res = run_experiment(&cfg)?;
        report_exclusions(file, &res, notes);
        write_summary(dir, file, &res.summary)?;
    }
    notes.push(format!("finite: runs={runs} n={n}"));
    Ok(())
}

fn experiment_rates(user: &Settings, dir: &Path, notes: &mut Vec<String>) -> CliResult<()> {
    let mut s = experiment_settings(user, 50, 10_000_000);
    let n = positive(&s, "n")?;
    let lo = (n / 10_000).max(1);
    s.set_default("checkpoints", format!("log:{lo}:{n}:25"));
    let mut cfg = presets::lgssm_convergence(positive(&s, "runs")?, n, seed(&s)?);
    apply_overrides(&mut cfg, &s, Model::Lgssm)?;
    let res = run_experiment(&cfg)?;
    report_exclusions("rates", &res, notes);
    let param = cfg.family.default_rate_param();
    let theta_star = cfg.family.true_value(param).expect("rate parameter exists");
    let opts = RateOptions {
        min_n_obs: cfg.checkpoints[0],
        ..RateOptions::default()
    };
    let a = cfg.schedule.a();
    let mut slopes = create(dir, "rates.csv")?;
    writeln!(slopes, "algorithm,param,slope,std_err,target,first_n_obs,last_n_obs,n_points")?;
    let mut rmse = create(dir, "rates_rmse.csv")?;
    writeln!(rmse, "algorithm,n_obs,param,rmse")?;
    for (alg, target) in [(Algorithm::Boem, -a / (2.0 * (a + 1.0))), (Algorithm::BoemAvg, -0.5)] {
        let est = rate_slope(&res.trajectories(alg), theta_star, param, &opts)?;
        writeln!(
            slopes,
            "{alg},{param},{},{},{},{},{},{}",
            fmt_f64(est.slope),
            fmt_f64(est.std_err),
            fmt_f64(target),
            est.points[0].0,
            est.points[est.points.len() - 1].0,
            est.points.len()
        )?;
        for (k, e) in &est.points {
            writeln!(rmse, "{alg},{k},{param},{}", fmt_f64(*e))?;
        }
        println!("{alg}: slope {:.3} +/- {:.3} (target {target:.3})", est.slope, est.std_err);
    }
    slopes.flush()?;
    rmse.flush()?;
    notes.push(format!("rates: runs={} n={n} checkpoints={}", cfg.n_runs, s.raw("checkpoints").unwrap()));
    println!("wrote {}", dir.join("rates.csv").display());
    Ok(())
}

pub fn experiment(settings: &Settings) -> CliResult<()> {
    let mut s = settings.clone();
    s.set_default("seed", "1");
    s.set_default("out", "boem-out");
    let name = s.require("name", "(lgm, lgm-blocksize, finite, rates, all)")?.to_string();
    let names: Vec<&str> = match name.as_str() {
        "all" => vec!["lgm", "lgm-blocksize", "finite", "rates"],
        "lgm" | "lgm-blocksize" | "finite" | "rates" => vec![name.as_str()],
        _ => return Err(usage(format!("--name: unknown experiment {name:?} (lgm, lgm-blocksize, finite, rates, all)"))),
    };
    let dir = out_dir(&s)?;
    let mut notes = Vec::new();
    for name in names {
        match name {
            "lgm" => experiment_lgm(&s, &dir, &mut notes)?,
            "lgm-blocksize" => experiment_blocksize(&s, &dir, &mut notes)?,
            "finite" => experiment_finite(&s, &dir, &mut notes)?,
            _ => experiment_rates(&s, &dir, &mut notes)?,
        }
    }
    write_metadata(&dir, "experiment", &s, &notes)
}

pub fn compare(settings: &Settings) -> CliResult<()> {
    let mut s = settings.clone();
    s.set_default("model", "finite");
    s.set_default("runs", "20");
    s.set_default("n", "100000");
    s.set_default("seed", "1");
    s.set_default("out", "boem-out");
    let model = Model::parse(s.raw("model").unwrap())?;
    if model == Model::Lgssm {
        return Err(usage("--model: compare needs a finite model (online EM is finite only)"));
    }
    s.set_default("params", model.default_params());
    let (runs, n) = (positive(&s, "runs")?, positive(&s, "n")?);
    let base = match model {
        Model::FiniteTransitions => presets::six_state_transitions_study(runs, n, seed(&s)?),
        _ => presets::six_state_levels(runs, n, seed(&s)?),
    };
    let params = s.list("params").unwrap_or_default();
    let mut cfg = ExperimentConfig {
        algorithms: vec![Algorithm::BoemAvg, Algorithm::OemAvg],
        params: Some(params.clone()),
        ..base
    };
    apply_overrides(&mut cfg, &s, model)?;
    let res = run_experiment(&cfg)?;
    let mut notes = Vec::new();
    report_exclusions("compare", &res, &mut notes);

    let dir = out_dir(&s)?;
    let mut w = create(&dir, "compare.csv")?;
    writeln!(w, "n_obs,param,boem_avg_median,boem_avg_q1,boem_avg_q3,oem_avg_median,oem_avg_q1,oem_avg_q3")?;
    for b in res.summary.rows.iter().filter(|r| r.algorithm == "boem-avg") {
        let Some(o) = res.summary.get("oem-avg", b.n_obs, &b.param) else { continue };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            b.n_obs,
            b.param,
            fmt_f64(b.median),
            fmt_f64(b.q1),
            fmt_f64(b.q3),
            fmt_f64(o.median),
            fmt_f64(o.q1),
            fmt_f64(o.q3)
        )?;
    }
    w.flush()?;
    write_metadata(&dir, "compare", &s, &notes)?;
    println!("{:<8} {:>14} {:>14}", "param", "boem-avg", "oem-avg");
    for p in &params {
        if let (Some(b), Some(o)) = (res.summary.last("boem-avg", p), res.summary.last("oem-avg", p)) {
            println!("{p:<8} {:>14.5} {:>14.5}", b.median, o.median);
        }
    }
    println!("wrote {}", dir.join("compare.csv").display());
    Ok(())
}
