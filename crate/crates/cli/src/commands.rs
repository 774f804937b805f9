use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::chart::ChartSpec;
use crate::suites::{run_suite, Suite};
use rugged_onemax::harness::{
    aggregate, figure1_preset, read_aggregate_csv, run_sweep, write_aggregate_csv, write_meta,
    write_records_csv, AggregateRow, ExperimentConfig, Expr, NoiseKind, NoiseSpec, Statistic,
    DEFAULT_BUDGET, DEFAULT_K,
};
use rugged_onemax::landscape::FrozenLandscape;
use rugged_onemax::optimizers::{run, Algorithm, RunOptions};
use rugged_onemax::seed::derive_seed;
use rugged_onemax::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "rugged",
    version,
    about = "Optimizers on OneMax with frozen per-point noise"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one optimizer once and print its record as JSON.
    Run(RunArgs),
    /// Run a grid of (algorithm, n, repetition) cells and write CSV files.
    Sweep(SweepArgs),
    /// Check closed-form bounds against simulation; one JSON line per check.
    Verify(VerifyArgs),
    /// Draw an aggregate table as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub algo: Algorithm,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "none")]
    pub noise: NoiseKind,
    #[arg(long, default_value_t = 5.0)]
    pub variance: f64,
    #[arg(long, default_value = DEFAULT_BUDGET)]
    pub budget: Expr,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// cGA step denominator; defaults to sqrt(n)*ln(n).
    #[arg(long = "K", alias = "k")]
    pub k: Option<Expr>,
    /// Also print the noise of the start point and of every accepted point.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Config file in the flat TOML format (see README).
    #[arg(long, conflicts_with_all = ["preset", "algos", "n_values"])]
    pub config: Option<PathBuf>,
    /// The reference preset: all algorithms, n = 100..n-max step 100, both noise models.
    #[arg(long = "paper-fig1")]
    pub preset: bool,
    #[arg(long, default_value_t = 1000, requires = "preset")]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',')]
    pub algos: Option<Vec<Algorithm>>,
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<usize>>,
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub budget: Option<Expr>,
    #[arg(long = "K", alias = "k")]
    pub k: Option<Expr>,
    #[arg(long)]
    pub noise: Option<NoiseKind>,
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub statistic: Option<Statistic>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: Suite,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub include_cga: bool,
}

/// What a command produced: text for stdout and whether every check passed.
pub struct Outcome {
    pub stdout: String,
    pub passed: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            passed: true,
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Run(a) => cmd_run(a).map(Outcome::ok),
        Command::Sweep(a) => cmd_sweep(a).map(Outcome::ok),
        Command::Verify(a) => cmd_verify(a),
        Command::Plot(a) => cmd_plot(a).map(Outcome::ok),
    }
}

pub fn cmd_run(a: &RunArgs) -> Result<String> {
    if a.n < 2 {
        return Err(Error::Config("n must be ≥ 2".into()));
    }
    let noise = NoiseSpec::new(a.noise, a.variance).model()?;
    let budget = a.budget.eval_count(a.n)?;
    let k = match (a.algo, &a.k) {
        (Algorithm::Cga, Some(rule)) => Some(rule.eval(a.n)?),
        (Algorithm::Cga, None) => Some(Expr::parse(DEFAULT_K)?.eval(a.n)?),
        (other, Some(_)) => {
            return Err(Error::Config(format!(
                "--K only applies to cga, not {other}"
            )))
        }
        (_, None) => None,
    };
    let landscape_seed = derive_seed(a.seed, "landscape", a.algo.id(), a.n as u64, 0);
    let run_seed = derive_seed(a.seed, "run", a.algo.id(), a.n as u64, 0);
    let landscape = FrozenLandscape::new(a.n, noise, landscape_seed)?;
    let mut options = RunOptions::new(budget);
    options.k = k;
    options.trace_noise = a.trace;
    let tel = run(
        a.algo,
        &landscape,
        &options,
        &mut ChaCha8Rng::seed_from_u64(run_seed),
    )?;
    let mut record = json!({
        "algorithm": a.algo.name(),
        "n": a.n,
        "rep": 0,
        "run_seed": run_seed,
        "landscape_seed": landscape_seed,
        "budget": budget,
        "iterations": tel.iterations,
        "transitions": tel.accepted_transitions,
        "max_ones": tel.max_ones_sampled,
        "final_ones": tel.final_ones,
        "wall_ms": 0,
        "noise": noise,
        "k": k,
        "improving_transitions": tel.improving_transitions,
        "start_ones": tel.start_ones,
        "absorbed": tel.absorbed,
    });
    if let Some(trace) = tel.noise_trace {
        record["noise_trace"] = json!(trace);
    }
    Ok(format!("{record}\n"))
}

/// Resolves the sweep flags into one config per noise model.
pub fn sweep_configs(a: &SweepArgs) -> Result<Vec<ExperimentConfig>> {
    if a.preset {
        return Ok(figure1_preset(
            a.reps.unwrap_or(100),
            a.n_max,
            a.seed.unwrap_or(0),
        ));
    }
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::from_toml_str(&fs::read_to_string(path)?)?,
        None => {
            let n_values = a
                .n_values
                .clone()
                .ok_or_else(|| Error::Config("give --config, --paper-fig1 or --n-values".into()))?;
            let noise = a.noise.unwrap_or(NoiseKind::Normal);
            let mut cfg =
                ExperimentConfig::new(n_values, a.reps.unwrap_or(1), NoiseSpec::new(noise, 5.0), 0);
            if let Some(algos) = &a.algos {
                cfg.algorithms = algos.clone();
            }
            cfg
        }
    };
    // inline flags refine a config file
    if let Some(r) = a.reps {
        cfg.repetitions = r;
    }
    if let Some(b) = &a.budget {
        cfg.budget_rule = b.clone();
    }
    if let Some(k) = &a.k {
        cfg.k_rule = k.clone();
    }
    if let Some(noise) = a.noise {
        cfg.noise.kind = noise;
    }
    if let Some(v) = a.variance {
        cfg.noise.variance = v;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    if let Some(s) = a.statistic {
        cfg.statistic = s;
    }
    Ok(vec![cfg])
}

fn check_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".rugged-write-probe");
    File::create(&probe)?;
    fs::remove_file(&probe)?;
    Ok(())
}

/// Writes `records_<noise>.csv` with a `.meta.toml` sidecar per config, and
/// one `aggregate.csv` whose series are labelled `algorithm:noise`.
pub fn cmd_sweep(a: &SweepArgs) -> Result<String> {
    let configs = sweep_configs(a)?;
    for cfg in &configs {
        cfg.validate()?;
    }
    let mut kinds: Vec<NoiseKind> = configs.iter().map(|c| c.noise.kind).collect();
    kinds.dedup();
    if kinds.len() != configs.len() {
        return Err(Error::Config("two sweeps share a noise model".into()));
    }
    check_writable(&a.out).map_err(|e| {
        Error::Config(format!(
            "output directory {} is not writable: {e}",
            a.out.display()
        ))
    })?;

    let mut rows: Vec<AggregateRow> = Vec::new();
    let mut summary = String::new();
    for cfg in &configs {
        let records = run_sweep(cfg)?;
        let stem = format!("records_{}", cfg.noise.kind);
        let csv_path = a.out.join(format!("{stem}.csv"));
        let mut w = BufWriter::new(File::create(&csv_path)?);
        write_records_csv(&records, &mut w)?;
        w.flush()?;
        write_meta(&a.out.join(format!("{stem}.meta.toml")), cfg, records.len())?;
        for mut row in aggregate(&records, cfg.statistic)? {
            row.algorithm = format!("{}:{}", row.algorithm, cfg.noise.kind);
            rows.push(row);
        }
        summary.push_str(&format!(
            "{} records -> {}\n",
            records.len(),
            csv_path.display()
        ));
    }
    let agg_path = a.out.join("aggregate.csv");
    let mut w = BufWriter::new(File::create(&agg_path)?);
    write_aggregate_csv(&rows, &mut w)?;
    w.flush()?;
    summary.push_str(&format!(
        "{} aggregate rows -> {}\n",
        rows.len(),
        agg_path.display()
    ));
    Ok(summary)
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let reports = run_suite(a.suite, a.trials, a.seed)?;
    let mut stdout = String::new();
    for r in &reports {
        stdout.push_str(&r.to_json_line());
        stdout.push('\n');
    }
    Ok(Outcome {
        stdout,
        passed: !reports.iter().any(|r| r.verdict.is_failure()),
    })
}

/// Validates everything before creating the output file.
pub fn cmd_plot(a: &PlotArgs) -> Result<String> {
    let rows = read_aggregate_csv(File::open(&a.input)?)?;
    let svg = ChartSpec::from_rows(&rows, a.include_cga)?.to_svg()?;
    fs::write(&a.out, svg)?;
    Ok(format!("wrote {}\n", a.out.display()))
}
