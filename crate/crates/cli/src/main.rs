//! `plc`: compress, decompress and run experiments with the perceptron lossy codec.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use plc_core::harness::{
    bits_from_bytes, bits_from_text, bits_to_bytes, bits_to_text, compress, decompress,
    parse_key_values, rng_from_seed, run_experiment, svg_plot, sweep, ConfigMap, ExperimentConfig,
    SweepAxis,
};
use plc_core::oracle::estimate_tail_probability;
use plc_core::reference::{default_threshold, rd_curve, DEFAULT_CURVE_POINTS};
use plc_core::{codec::hamming_distortion, BinarySeq, CodecParams, SourceModel};

#[derive(Parser)]
#[command(
    name = "plc",
    version,
    about = "Perceptron-based lossy compression of biased binary data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a bit file into a PLC1 container.
    Compress(CompressArgs),
    /// Restore the representative data from a container.
    Decompress(DecompressArgs),
    /// Emit the rate-distortion curve of a Bernoulli source as `D,R` CSV.
    Rdcurve(RdcurveArgs),
    /// Distortion-vs-rate experiment with the message-passing encoder.
    Experiment(ExperimentArgs),
    /// Repeat the experiment over a grid of one codec parameter.
    Sweep(SweepArgs),
    /// Monte Carlo fidelity tail probabilities with the exhaustive encoder.
    Exponent(ExponentArgs),
}

#[derive(Args)]
struct CompressArgs {
    /// Input file (raw bytes, MSB-first, or 0/1 text with --text).
    input: PathBuf,
    /// Output container.
    #[arg(short, long)]
    output: PathBuf,
    /// Coding rate N/M.
    #[arg(long)]
    rate: f64,
    /// Threshold k. Defaults to a heuristic matching the data's +1 fraction,
    /// a placeholder rather than an optimized value.
    #[arg(long)]
    k: Option<f64>,
    /// Inverse temperature (heuristic default).
    #[arg(long, default_value_t = CodecParams::<f64>::DEFAULT_BETA)]
    beta: f64,
    /// Inertia constant in [0, 1).
    #[arg(long, default_value_t = CodecParams::<f64>::DEFAULT_GAMMA)]
    gamma: f64,
    /// Message-passing sweeps.
    #[arg(long, default_value_t = CodecParams::<f64>::DEFAULT_ITERS)]
    iters: usize,
    /// Initial magnetization amplitude.
    #[arg(long, default_value_t = CodecParams::<f64>::DEFAULT_INIT_AMPLITUDE)]
    delta: f64,
    /// Keep the best readout over all sweeps instead of the last.
    #[arg(long)]
    best_iterate: bool,
    /// Seed for the codebook and the encoder initialization.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Treat the input as 0/1 text.
    #[arg(long)]
    text: bool,
}

#[derive(Args)]
struct DecompressArgs {
    /// Input container.
    input: PathBuf,
    /// Output file for the restored data.
    #[arg(short, long)]
    output: PathBuf,
    /// Original data, to report the distortion.
    #[arg(long)]
    original: Option<PathBuf>,
    /// Read and write 0/1 text instead of raw bytes.
    #[arg(long)]
    text: bool,
}

#[derive(Args)]
struct RdcurveArgs {
    /// Probability of a +1 symbol.
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = DEFAULT_CURVE_POINTS)]
    points: usize,
    /// Output CSV (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    /// key=value settings file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated coding rates.
    #[arg(long)]
    rates: Option<String>,
    /// Compressed length N.
    #[arg(long)]
    n: Option<usize>,
    /// Compressed length used for rates <= 0.2.
    #[arg(long)]
    low_rate_n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Threshold k (heuristic default matching the source bias).
    #[arg(long)]
    k: Option<f64>,
    /// Inverse temperature (heuristic default 1).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon_q: Option<f64>,
    #[arg(long)]
    best_iterate: bool,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output prefix; writes PREFIX.detail.csv and PREFIX.aggregate.csv.
    #[arg(long)]
    out: Option<String>,
    /// Also write an SVG plot of the aggregates.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Parameter to sweep: gamma, beta or k.
    #[arg(long)]
    axis: String,
    /// Comma-separated grid values.
    #[arg(long)]
    grid: String,
}

#[derive(Args)]
struct ExponentArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    rate: f64,
    /// Fidelity threshold D (per-symbol distortion).
    #[arg(long)]
    distortion: f64,
    /// Comma-separated source lengths M.
    #[arg(long)]
    m_list: String,
    #[arg(long)]
    trials: usize,
    /// Threshold k (defaults to the bias-matching heuristic).
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compress(args) => cmd_compress(args),
        Command::Decompress(args) => cmd_decompress(args),
        Command::Rdcurve(args) => cmd_rdcurve(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Exponent(args) => cmd_exponent(args),
    }
}

fn read_bits(path: &Path, text: bool) -> Result<BinarySeq> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let seq = if text {
        bits_from_text(std::str::from_utf8(&bytes).context("input is not UTF-8 text")?)?
    } else {
        bits_from_bytes(&bytes)?
    };
    Ok(seq)
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn cmd_compress(args: CompressArgs) -> Result<()> {
    let y = read_bits(&args.input, args.text)?;
    let k = match args.k {
        Some(k) => k,
        None => {
            let bias = (y.count_plus() as f64 / y.len() as f64).clamp(1e-3, 1.0 - 1e-3);
            default_threshold(bias)?
        }
    };
    let params = CodecParams::new(k)
        .with_beta(args.beta)
        .with_gamma(args.gamma)
        .with_max_iters(args.iters)
        .with_init_amplitude(args.delta)
        .with_best_iterate(args.best_iterate);
    let out = compress(&y, args.rate, &params, args.seed)?;
    fs::write(&args.output, &out.bytes)
        .with_context(|| format!("writing {}", args.output.display()))?;
    eprintln!(
        "M={} N={} k={} distortion={} ({:.6} per bit)",
        out.blob.m,
        out.blob.n,
        out.blob.k,
        out.distortion,
        out.distortion as f64 / out.blob.m as f64
    );
    Ok(())
}

fn cmd_decompress(args: DecompressArgs) -> Result<()> {
    let bytes =
        fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let (blob, restored) = decompress(&bytes)?;
    if args.text {
        fs::write(&args.output, bits_to_text(&restored))?;
    } else {
        fs::write(&args.output, bits_to_bytes(&restored))?;
    }
    eprint!("M={} N={} k={}", blob.m, blob.n, blob.k);
    if let Some(original) = &args.original {
        let y = read_bits(original, args.text)?;
        if y.len() != restored.len() {
            bail!(
                "original has {} symbols but the container encodes {}",
                y.len(),
                restored.len()
            );
        }
        let d = hamming_distortion(&y, &restored)?;
        eprint!(" distortion={d} ({:.6} per bit)", d as f64 / blob.m as f64);
    }
    eprintln!();
    Ok(())
}

fn cmd_rdcurve(args: RdcurveArgs) -> Result<()> {
    let curve = rd_curve(args.p, args.points)?;
    write_output(args.output.as_deref(), &curve.to_csv())
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut map = match &args.config {
        Some(path) => parse_key_values(
            &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => ConfigMap::new(),
    };
    let mut set = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            map.insert(key.to_string(), v);
        }
    };
    set("p", args.p.map(|v| v.to_string()));
    set("rates", args.rates.clone());
    set("n", args.n.map(|v| v.to_string()));
    set("low-rate-n", args.low_rate_n.map(|v| v.to_string()));
    set("trials", args.trials.map(|v| v.to_string()));
    set("k", args.k.map(|v| v.to_string()));
    set("beta", args.beta.map(|v| v.to_string()));
    set("gamma", args.gamma.map(|v| v.to_string()));
    set("iters", args.iters.map(|v| v.to_string()));
    set("delta", args.delta.map(|v| v.to_string()));
    set("epsilon-q", args.epsilon_q.map(|v| v.to_string()));
    set(
        "best-iterate",
        args.best_iterate.then(|| "true".to_string()),
    );
    set("seed", args.seed.map(|v| v.to_string()));
    set("workers", args.workers.map(|v| v.to_string()));
    set("out", args.out.clone());
    Ok(ExperimentConfig::from_map(&map)?)
}

fn write_prefixed(prefix: &str, suffix: &str, contents: &str) -> Result<()> {
    let path = format!("{prefix}.{suffix}");
    fs::write(&path, contents).with_context(|| format!("writing {path}"))
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let cfg = experiment_config(&args)?;
    let result = run_experiment(&cfg)?;
    for (rate, trial, msg) in &result.errors {
        eprintln!("warning: R={rate} trial {trial}: {msg}");
    }
    match &cfg.output {
        Some(prefix) => {
            let prefix = prefix.to_string_lossy();
            write_prefixed(&prefix, "detail.csv", &result.detail_csv())?;
            write_prefixed(&prefix, "aggregate.csv", &result.aggregate_csv())?;
        }
        None => print!("{}", result.aggregate_csv()),
    }
    if let Some(svg) = &args.svg {
        fs::write(svg, svg_plot(cfg.p, &result.aggregates))?;
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad grid value {s:?}"))
        })
        .collect()
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let cfg = experiment_config(&args.experiment)?;
    let axis: SweepAxis = args.axis.parse()?;
    let grid = parse_grid(&args.grid)?;
    let result = sweep(&cfg, axis, &grid)?;
    match &cfg.output {
        Some(prefix) => {
            let prefix = prefix.to_string_lossy();
            write_prefixed(&prefix, "detail.csv", &result.detail_csv())?;
            write_prefixed(&prefix, "aggregate.csv", &result.aggregate_csv())?;
            write_prefixed(&prefix, "best.csv", &result.best_csv())?;
        }
        None => {
            print!("{}", result.aggregate_csv());
            print!("{}", result.best_csv());
        }
    }
    Ok(())
}

fn cmd_exponent(args: ExponentArgs) -> Result<()> {
    let source = SourceModel::new(args.p)?;
    let k = match args.k {
        Some(k) => k,
        None => default_threshold(args.p)?,
    };
    let lengths: Vec<usize> = args
        .m_list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .with_context(|| format!("bad source length {s:?}"))
        })
        .collect::<Result<_>>()?;
    if lengths.is_empty() {
        bail!("--m-list must name at least one length");
    }
    let mut csv = String::from("M,N,R,D,trials,regime,failures,p_hat,rate_estimate\n");
    for (i, &m) in lengths.iter().enumerate() {
        let mut rng = rng_from_seed(args.seed.wrapping_add(i as u64));
        let est = estimate_tail_probability(
            source,
            m,
            args.rate,
            args.distortion,
            k,
            args.trials,
            &mut rng,
        )?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            est.m,
            est.n,
            est.rate,
            est.distortion,
            est.trials,
            est.regime.as_str(),
            est.failures,
            est.p_hat,
            est.rate_estimate.map(|r| r.to_string()).unwrap_or_default()
        ));
    }
    write_output(args.output.as_deref(), &csv)
}
