//! `normat`: generate datasets, benchmark factorized against materialized
//! execution, train models and explain dispatch decisions.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 correctness failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use normat_core::costmodel::{decide, predict_counts, DecisionThresholds, ExtraDims, OperatorId};
use normat_core::ml::{Algorithm, TrainConfig};
use normat_core::ShapeStats;

use normat::bench::{bench_algo, bench_op, BenchOperator, BenchOptions};
use normat::dataio::{self, SynthParams, SCHEMA_FILE};
use normat::report::{write_bench_csv, write_json, BenchRecord, Dims, ExplainReport, OpPrediction};
use normat::train::{parse_algorithm, train, Mode};
use normat::{init_threads, DataError};

#[derive(Debug, Parser)]
#[command(name = "normat", version, about = "Factorized linear algebra over normalized data")]
struct Cli {
    /// Worker threads for the parallel kernels (0 = library default).
    #[arg(long, global = true, env = "MORPHEUS_THREADS", value_parser = parse_count)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset with its schema and manifest.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Time materialized against factorized execution.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Train a model and write it as JSON.
    Train(TrainArgs),
    /// Print tuple/feature ratios, predicted counts and the dispatch verdict.
    Explain(ExplainArgs),
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Entity table with one foreign key into an attribute table.
    Pkfk(GenPkfkArgs),
    /// Two tables joined on a non-unique attribute.
    Mn(GenMnArgs),
}

#[derive(Debug, Args)]
struct GenCommon {
    /// Entity table rows.
    #[arg(long, value_parser = parse_count)]
    ns: usize,
    /// Entity table features.
    #[arg(long, value_parser = parse_count)]
    ds: usize,
    /// Attribute table features.
    #[arg(long, value_parser = parse_count)]
    dr: usize,
    /// Fraction of nonzero feature values; below 1 features go to sparse triplet files.
    #[arg(long, default_value_t = 1.0, value_parser = parse_real)]
    density: f64,
    #[arg(long, default_value_t = 0, value_parser = parse_seed)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GenPkfkArgs {
    #[command(flatten)]
    common: GenCommon,
    /// Attribute table rows.
    #[arg(long, value_parser = parse_count)]
    nr: usize,
}

#[derive(Debug, Args)]
struct GenMnArgs {
    #[command(flatten)]
    common: GenCommon,
    /// Attribute table rows (defaults to --ns).
    #[arg(long, value_parser = parse_count)]
    nr: Option<usize>,
    /// Distinct join values.
    #[arg(long, value_parser = parse_count, conflicts_with = "nu_frac", required_unless_present = "nu_frac")]
    nu: Option<usize>,
    /// Distinct join values as a fraction of --ns.
    #[arg(long, value_parser = parse_real)]
    nu_frac: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum BenchCommand {
    /// Benchmark linear-algebra operators.
    Op(BenchOpArgs),
    /// Benchmark training algorithms.
    Algo(BenchAlgoArgs),
}

#[derive(Debug, Args)]
struct Thresholds {
    /// Tuple-ratio cutoff of the cost model.
    #[arg(long, default_value_t = 5.0, value_parser = parse_real)]
    tau: f64,
    /// Feature-ratio cutoff of the cost model.
    #[arg(long, default_value_t = 1.0, value_parser = parse_real)]
    rho: f64,
}

impl Thresholds {
    fn get(&self) -> Result<DecisionThresholds, CliError> {
        DecisionThresholds::new(self.tau, self.rho).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
struct Harness {
    /// Dataset directory (containing schema.json) or schema file.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 2, value_parser = parse_count)]
    warmup: usize,
    #[arg(long, default_value_t = 5, value_parser = parse_count)]
    trials: usize,
    /// Seed of random operands and model initialization.
    #[arg(long, default_value_t = 0, value_parser = parse_seed)]
    seed: u64,
    #[command(flatten)]
    thresholds: Thresholds,
    /// JSON results file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a plot-ready CSV summary.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchOpArgs {
    #[command(flatten)]
    harness: Harness,
    /// Operators, comma separated.
    #[arg(long, value_delimiter = ',', required = true, value_parser = |s: &str| s.parse::<BenchOperator>())]
    op: Vec<BenchOperator>,
    /// Columns of X in T·X.
    #[arg(long, default_value_t = 10, value_parser = parse_count)]
    dx: usize,
    /// Rows of X in X·T.
    #[arg(long, default_value_t = 10, value_parser = parse_count)]
    nx: usize,
}

#[derive(Debug, Args)]
struct Hyper {
    #[arg(long, default_value_t = 20, value_parser = parse_count)]
    iters: usize,
    /// Gradient step size.
    #[arg(long, default_value_t = 1e-3, value_parser = parse_real)]
    step: f64,
    /// K-Means centroids.
    #[arg(long, default_value_t = 10, value_parser = parse_count)]
    k: usize,
    /// GNMF rank.
    #[arg(long, default_value_t = 5, value_parser = parse_count)]
    r: usize,
}

impl Hyper {
    fn config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            iterations: self.iters,
            step_size: self.step,
            k: self.k,
            rank: self.r,
            seed,
            record_states: false,
        }
    }
}

#[derive(Debug, Args)]
struct BenchAlgoArgs {
    #[command(flatten)]
    harness: Harness,
    /// Algorithms, comma separated.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_algorithm)]
    algo: Vec<Algorithm>,
    #[command(flatten)]
    hyper: Hyper,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Dataset directory (containing schema.json) or schema file.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    #[arg(long, default_value = "auto", value_parser = |s: &str| s.parse::<Mode>())]
    mode: Mode,
    #[command(flatten)]
    hyper: Hyper,
    #[arg(long, default_value_t = 0, value_parser = parse_seed)]
    seed: u64,
    #[command(flatten)]
    thresholds: Thresholds,
    /// Model JSON file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExplainArgs {
    /// Dataset directory (containing schema.json) or schema file.
    #[arg(long, conflicts_with_all = ["ns", "nr", "ds", "dr"], required_unless_present_all = ["ns", "nr", "ds", "dr"])]
    data: Option<PathBuf>,
    #[arg(long, value_parser = parse_count)]
    ns: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    nr: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    ds: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    dr: Option<usize>,
    #[arg(long, default_value_t = 10, value_parser = parse_count)]
    dx: usize,
    #[arg(long, default_value_t = 10, value_parser = parse_count)]
    nx: usize,
    #[command(flatten)]
    thresholds: Thresholds,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

/// Parses a non-negative integer, accepting scientific notation (`2e5`).
fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= 9.007_199_254_740_992e15 {
        Ok(v as usize)
    } else {
        Err(format!("`{s}` is not a non-negative integer"))
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    parse_count(s).map(|n| n as u64)
}

fn parse_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(DataError),
    Correctness(String),
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::InvalidParams(m) => CliError::Usage(m),
            DataError::Core(normat_core::Error::InvalidConfig(m)) => CliError::Usage(m),
            e => CliError::Data(e),
        }
    }
}

impl From<normat_core::Error> for CliError {
    fn from(e: normat_core::Error) -> Self {
        DataError::from(e).into()
    }
}

fn schema_path(data: &Path) -> PathBuf {
    if data.is_dir() {
        data.join(SCHEMA_FILE)
    } else {
        data.to_path_buf()
    }
}

fn cmd_gen(cmd: GenCommand) -> Result<(), CliError> {
    let (params, out, mn) = match cmd {
        GenCommand::Pkfk(a) => {
            let c = a.common;
            let p =
                SynthParams { n_s: c.ns, n_r: a.nr, d_s: c.ds, d_r: c.dr, n_u: None, density: c.density, seed: c.seed };
            (p, c.out, false)
        }
        GenCommand::Mn(a) => {
            let c = a.common;
            let n_u = match (a.nu, a.nu_frac) {
                (Some(n), _) => n,
                (None, Some(f)) => (f * c.ns as f64).round() as usize,
                (None, None) => unreachable!("clap requires one of --nu / --nu-frac"),
            };
            let p = SynthParams {
                n_s: c.ns,
                n_r: a.nr.unwrap_or(c.ns),
                d_s: c.ds,
                d_r: c.dr,
                n_u: Some(n_u),
                density: c.density,
                seed: c.seed,
            };
            (p, c.out, true)
        }
    };
    let manifest = if mn { dataio::gen_mn(&params, &out)? } else { dataio::gen_pkfk(&params, &out)? };
    log::info!("wrote {} files to {} ({} join rows)", manifest.files.len(), out.display(), manifest.join_rows);
    Ok(())
}

fn finish_bench(h: &Harness, records: Vec<BenchRecord>) -> Result<(), CliError> {
    write_json(&records, h.out.as_deref())?;
    if let Some(csv) = &h.csv {
        write_bench_csv(csv, &records)?;
    }
    let failed: Vec<&str> = records.iter().filter(|r| !r.passed).map(|r| r.op.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Correctness(format!("factorized and materialized results disagree for: {}", failed.join(", "))))
    }
}

fn cmd_bench(cmd: BenchCommand, threads: usize) -> Result<(), CliError> {
    let h = match &cmd {
        BenchCommand::Op(a) => &a.harness,
        BenchCommand::Algo(a) => &a.harness,
    };
    let mut opts = BenchOptions {
        warmup: h.warmup,
        trials: h.trials,
        seed: h.seed,
        thresholds: h.thresholds.get()?,
        threads,
        ..BenchOptions::default()
    };
    let data = dataio::load(&schema_path(&h.data))?;
    let t = data.matrix.materialize();
    let mut records = Vec::new();
    match &cmd {
        BenchCommand::Op(a) => {
            opts.d_x = a.dx;
            opts.n_x = a.nx;
            for &op in &a.op {
                log::info!("benchmarking {op}");
                records.push(bench_op(&data.matrix, &t, op, &opts)?);
            }
        }
        BenchCommand::Algo(a) => {
            let cfg = a.hyper.config(h.seed);
            for &algo in &a.algo {
                log::info!("benchmarking {}", algo.as_str());
                records.push(bench_algo(&data.matrix, &t, data.target.as_ref(), algo, &cfg, &opts)?);
            }
        }
    }
    finish_bench(h, records)
}

fn cmd_train(a: TrainArgs, threads: usize) -> Result<(), CliError> {
    let thresholds = a.thresholds.get()?;
    let data = dataio::load(&schema_path(&a.data))?;
    let report = train(&data, a.algo, a.mode, &a.hyper.config(a.seed), thresholds, threads)?;
    write_json(&report, a.out.as_deref())?;
    Ok(())
}

fn cmd_explain(a: ExplainArgs) -> Result<(), CliError> {
    let thresholds = a.thresholds.get()?;
    let stats = match &a.data {
        Some(d) => dataio::load(&schema_path(d))?.matrix.stats(),
        None => {
            let dim = |v: Option<usize>| v.expect("clap requires all dimensions");
            ShapeStats::from_dims(dim(a.ns), dim(a.nr), dim(a.ds), dim(a.dr))
        }
    };
    let extra = ExtraDims { d_x: a.dx, n_x: a.nx };
    let operators = OperatorId::ALL
        .iter()
        .map(|&op| predict_counts(op, &stats, extra).map(|p| OpPrediction::from(&p)))
        .collect::<Result<Vec<_>, _>>()?;
    let report = ExplainReport {
        dims: Dims::from(&stats),
        tau: thresholds.tau,
        rho: thresholds.rho,
        decision: decide(&stats, thresholds).as_str().into(),
        operators,
    };
    if a.json {
        write_json(&report, None)?;
        return Ok(());
    }
    let d = &report.dims;
    println!("join kind      {}", d.kind);
    println!("n_S, d_S       {}, {}", d.n_s, d.d_s);
    println!("n_R, d_R       {:?}, {:?}", d.n_r, d.d_r);
    println!("join rows      {}", d.join_rows);
    println!("tuple ratio    {:.4}", d.tuple_ratio);
    println!("feature ratio  {:.4}", d.feature_ratio);
    println!();
    println!("{:<12} {:>14} {:>14} {:>10}", "operator", "standard", "factorized", "speedup");
    for p in &report.operators {
        println!("{:<12} {:>14.4e} {:>14.4e} {:>10.3}", p.op, p.standard, p.factorized, p.predicted_speedup);
    }
    println!();
    println!("verdict (tau={}, rho={}): {}", report.tau, report.rho, report.decision);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let threads = init_threads(cli.threads);
    let result = match cli.command {
        Command::Gen(c) => cmd_gen(c),
        Command::Bench(c) => cmd_bench(c, threads),
        Command::Train(a) => cmd_train(a, threads),
        Command::Explain(a) => cmd_explain(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Correctness(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
