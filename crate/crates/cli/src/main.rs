use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod settings;

use settings::{usage, CliError, CliResult, Settings};

#[derive(Parser)]
#[command(name = "boem", version, about = "Block online EM for hidden Markov models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a path from a reference model and write it as CSV.
    Simulate(SimulateArgs),
    /// Fit one observation stream (from --input or simulated inline).
    Fit(FitArgs),
    /// Run a Monte Carlo study and write its summary tables.
    Experiment(ExperimentArgs),
    /// Averaged block EM against averaged online EM on matched seeds.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// key=value settings file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// lgssm, finite (= finite-levels) or finite-transitions.
    #[arg(long)]
    model: Option<String>,
    /// Number of observations.
    #[arg(long)]
    n: Option<String>,
    /// Seed; defaults to $BOEM_SEED, then 1.
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated: boem, boem-avg, oem, oem-avg.
    #[arg(long)]
    algo: Option<String>,
    /// Block schedule exponent, tau_n = floor(c n^a), a > 1.
    #[arg(long)]
    a: Option<String>,
    /// Block schedule scale (default 1).
    #[arg(long)]
    c: Option<String>,
    /// Online EM step exponent, gamma_n = n^-gamma_exp, in (0.5, 1].
    #[arg(long = "gamma-exp")]
    gamma_exp: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// warm (filter carried across blocks) or reset.
    #[arg(long)]
    chi: Option<String>,
    /// Path CSV with a `y` column; simulated from the model when absent.
    #[arg(long)]
    input: Option<String>,
    /// List, log:LO:HI:COUNT or lin:COUNT.
    #[arg(long)]
    checkpoints: Option<String>,
    /// Observations before the first M-step.
    #[arg(long = "burn-in")]
    burn_in: Option<String>,
    /// Online EM averaging starts after this many observations.
    #[arg(long = "avg-start")]
    avg_start: Option<String>,
    /// Parameter groups held at their start value (finite: v, x, m; linear: phi, var_u, var_v; or none).
    #[arg(long)]
    fix: Option<String>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// lgm, lgm-blocksize, finite, rates or all.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads for the replicate runs.
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    chi: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long = "gamma-exp")]
    gamma_exp: Option<String>,
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long = "burn-in")]
    burn_in: Option<String>,
    #[arg(long = "avg-start")]
    avg_start: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// finite (= finite-levels) or finite-transitions.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    chi: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long = "gamma-exp")]
    gamma_exp: Option<String>,
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long = "burn-in")]
    burn_in: Option<String>,
    #[arg(long = "avg-start")]
    avg_start: Option<String>,
    /// Parameters to tabulate, comma-separated.
    #[arg(long)]
    params: Option<String>,
}

/// Loads the config file, applies `BOEM_SEED`, then the given flags.
fn resolve(config: &Option<PathBuf>, flags: &[(&str, &Option<String>)]) -> CliResult<Settings> {
    let mut settings = match config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    if let Ok(seed) = std::env::var("BOEM_SEED") {
        settings.set_default("seed", seed);
    }
    for (key, value) in flags {
        if let Some(v) = value {
            settings.set(key, v.clone());
        }
    }
    Ok(settings)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(a) => {
            let s = resolve(&a.config, &[("model", &a.model), ("n", &a.n), ("seed", &a.seed), ("out", &a.out)])?;
            commands::simulate(&s)
        }
        Command::Fit(a) => {
            let s = resolve(
                &a.config,
                &[
                    ("model", &a.model),
                    ("algo", &a.algo),
                    ("a", &a.a),
                    ("c", &a.c),
                    ("gamma-exp", &a.gamma_exp),
                    ("n", &a.n),
                    ("seed", &a.seed),
                    ("out", &a.out),
                    ("chi", &a.chi),
                    ("input", &a.input),
                    ("checkpoints", &a.checkpoints),
                    ("burn-in", &a.burn_in),
                    ("avg-start", &a.avg_start),
                    ("fix", &a.fix),
                ],
            )?;
            commands::fit(&s)
        }
        Command::Experiment(a) => {
            let s = resolve(
                &a.config,
                &[
                    ("name", &a.name),
                    ("runs", &a.runs),
                    ("n", &a.n),
                    ("seed", &a.seed),
                    ("threads", &a.threads),
                    ("out", &a.out),
                    ("chi", &a.chi),
                    ("a", &a.a),
                    ("c", &a.c),
                    ("gamma-exp", &a.gamma_exp),
                    ("checkpoints", &a.checkpoints),
                    ("burn-in", &a.burn_in),
                    ("avg-start", &a.avg_start),
                ],
            )?;
            commands::experiment(&s)
        }
        Command::Compare(a) => {
            let s = resolve(
                &a.config,
                &[
                    ("model", &a.model),
                    ("runs", &a.runs),
                    ("n", &a.n),
                    ("seed", &a.seed),
                    ("threads", &a.threads),
                    ("out", &a.out),
                    ("chi", &a.chi),
                    ("a", &a.a),
                    ("c", &a.c),
                    ("gamma-exp", &a.gamma_exp),
                    ("checkpoints", &a.checkpoints),
                    ("burn-in", &a.burn_in),
                    ("avg-start", &a.avg_start),
                    ("params", &a.params),
                ],
            )?;
            commands::compare(&s)
        }
    }
}

fn fail(err: CliError) -> ExitCode {
    let detail = err.to_string().replace('\n', " ");
    eprintln!("ERROR {}: {detail}", err.code());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return fail(usage(first.to_string()));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
