use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use super::config::ConfigMap;
use super::instance::gen_instance;
use crate::bp_encoder::encode_bp;
use crate::error::{Error, Result};
use crate::model::{CodecParams, SourceModel};
use crate::reference::{default_threshold, rdf_inverse_saturating};
use crate::rng::{rng_from_seed, RngStream};

/// Bumped whenever a CSV column changes.
pub const SCHEMA_VERSION: u32 = 1;
pub const DETAIL_HEADER: &str =
    "p,R,N,M,trial,seed,iters,converged,distortion_bits,distortion_per_bit";
pub const AGGREGATE_HEADER: &str = "p,R,N,M,trials,mean_D,stderr_D,rdf_D,k,beta,gamma";

/// Rates at or below this use `low_rate_n` code bits when it is set.
const LOW_RATE_CUTOFF: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub p: f64,
    pub rates: Vec<f64>,
    /// Compressed length N; the source length is `M = round(N / R)`.
    pub n: usize,
    /// Optional smaller N for rates `<= 0.2`.
    pub low_rate_n: Option<usize>,
    pub trials: usize,
    pub params: CodecParams<f64>,
    pub master_seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Config with the default threshold for `p` and default codec settings.
    pub fn new(p: f64, rates: Vec<f64>, n: usize, trials: usize) -> Result<Self> {
        let k = default_threshold(p)?;
        Ok(Self {
            p,
            rates,
            n,
            low_rate_n: None,
            trials,
            params: CodecParams::new(k),
            master_seed: 0,
            workers: 0,
            output: None,
        })
    }

    /// Builds a config from `key=value` settings named like the CLI flags:
    /// `p`, `rates`, `n`, `low-rate-n`, `trials`, `k`, `beta`, `gamma`,
    /// `iters`, `delta`, `epsilon-q`, `best-iterate`, `seed`, `workers`, `out`.
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let known = [
            "p",
            "rates",
            "n",
            "low-rate-n",
            "trials",
            "k",
            "beta",
            "gamma",
            "iters",
            "delta",
            "epsilon-q",
            "best-iterate",
            "seed",
            "workers",
            "out",
        ];
        if let Some(key) = map.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key {key:?}")));
        }
        let p: f64 = required(map, "p")?;
        let rates = match map.get("rates") {
            Some(v) => parse_list(v)?,
            None => return Err(Error::Config("missing key \"rates\"".into())),
        };
        let mut cfg = Self::new(
            p,
            rates,
            required(map, "n")?,
            optional(map, "trials")?.unwrap_or(100),
        )?;
        cfg.low_rate_n = optional(map, "low-rate-n")?;
        if let Some(k) = optional(map, "k")? {
            cfg.params.k = k;
        }
        if let Some(beta) = optional(map, "beta")? {
            cfg.params.beta = beta;
        }
        if let Some(gamma) = optional(map, "gamma")? {
            cfg.params.gamma = gamma;
        }
        if let Some(iters) = optional(map, "iters")? {
            cfg.params.max_iters = iters;
        }
        if let Some(delta) = optional(map, "delta")? {
            cfg.params.init_amplitude = delta;
        }
        if let Some(eps) = optional(map, "epsilon-q")? {
            cfg.params.epsilon_q = eps;
        }
        if let Some(best) = optional(map, "best-iterate")? {
            cfg.params.best_iterate = best;
        }
        if let Some(seed) = optional(map, "seed")? {
            cfg.master_seed = seed;
        }
        if let Some(workers) = optional(map, "workers")? {
            cfg.workers = workers;
        }
        cfg.output = map.get("out").map(PathBuf::from);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        SourceModel::new(self.p)?;
        self.params.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.rates.is_empty() {
            return Err(Error::Config("at least one rate is required".into()));
        }
        if let Some(r) = self.rates.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return Err(Error::Config(format!("rate {r} outside (0, 1]")));
        }
        if self.n == 0 || self.low_rate_n == Some(0) {
            return Err(Error::Config("N must be positive".into()));
        }
        Ok(())
    }

    /// Code length used at `rate`.
    pub fn n_for_rate(&self, rate: f64) -> usize {
        match self.low_rate_n {
            Some(n) if rate <= LOW_RATE_CUTOFF => n,
            _ => self.n,
        }
    }

    /// Source length `round(N / R)` at `rate`.
    pub fn m_for_rate(&self, rate: f64) -> usize {
        ((self.n_for_rate(rate) as f64 / rate).round() as usize).max(1)
    }
}

fn required<T: FromStr>(map: &ConfigMap, key: &str) -> Result<T> {
    optional(map, key)?.ok_or_else(|| Error::Config(format!("missing key {key:?}")))
}

fn optional<T: FromStr>(map: &ConfigMap, key: &str) -> Result<Option<T>> {
    map.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Config(format!("cannot parse {key} = {v:?}")))
        })
        .transpose()
}

fn parse_list(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse list element {s:?}")))
        })
        .collect()
}

/// Outcome of one encoded trial.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailRow {
    pub p: f64,
    pub rate: f64,
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub iters: usize,
    /// `None` when the trial failed with an encoder error.
    pub converged: Option<bool>,
    pub distortion_bits: Option<usize>,
    pub distortion_per_bit: Option<f64>,
}

impl DetailRow {
    fn csv_fields(&self) -> String {
        let converged = match self.converged {
            Some(true) => "true",
            Some(false) => "false",
            None => "error",
        };
        let bits = self
            .distortion_bits
            .map(|d| d.to_string())
            .unwrap_or_default();
        let per_bit = self
            .distortion_per_bit
            .map(|d| d.to_string())
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.rate,
            self.n,
            self.m,
            self.trial,
            self.seed,
            self.iters,
            converged,
            bits,
            per_bit
        )
    }
}

/// Summary over the successful trials at one rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub p: f64,
    pub rate: f64,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub mean_d: f64,
    pub stderr_d: f64,
    /// Rate-distortion bound at this rate.
    pub rdf_d: f64,
    pub k: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AggregateRow {
    fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.rate,
            self.n,
            self.m,
            self.trials,
            self.mean_d,
            self.stderr_d,
            self.rdf_d,
            self.k,
            self.beta,
            self.gamma
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub details: Vec<DetailRow>,
    pub aggregates: Vec<AggregateRow>,
    /// `(rate, trial, message)` for trials that raised an encoder error.
    pub errors: Vec<(f64, usize, String)>,
}

impl ExperimentResult {
    pub fn detail_csv(&self) -> String {
        let mut out = format!("# plc detail v{SCHEMA_VERSION}\n{DETAIL_HEADER}\n");
        for row in &self.details {
            let _ = writeln!(out, "{}", row.csv_fields());
        }
        out
    }

    pub fn aggregate_csv(&self) -> String {
        let mut out = format!("# plc aggregate v{SCHEMA_VERSION}\n{AGGREGATE_HEADER}\n");
        for row in &self.aggregates {
            let _ = writeln!(out, "{}", row.csv_fields());
        }
        out
    }
}

struct Job {
    rate: f64,
    n: usize,
    m: usize,
    trial: usize,
    seed: u64,
}

/// Draws distinct child seeds from the master stream.
fn child_seeds(master: &mut RngStream, count: usize, seen: &mut HashSet<u64>) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s = master.next_u64();
        if seen.insert(s) {
            out.push(s);
        }
    }
    out
}

fn run_job(cfg: &ExperimentConfig, job: &Job) -> Result<(usize, usize, bool)> {
    let mut rng = rng_from_seed(job.seed);
    let (y, codebook) = gen_instance::<f64>(cfg.p, job.m, job.n, &mut rng)?;
    let enc = encode_bp(&y, &codebook, &cfg.params, &mut rng)?;
    Ok((enc.distortion, enc.trace.records.len(), enc.trace.converged))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Runs `trials` independent encodes per rate. Every trial owns a child seed
/// drawn in (rate, trial) order from the master stream, so the output depends
/// only on the config, never on scheduling or worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut master = rng_from_seed(cfg.master_seed);
    let mut seen = HashSet::new();
    let mut jobs = Vec::with_capacity(cfg.rates.len() * cfg.trials);
    for &rate in &cfg.rates {
        let (n, m) = (cfg.n_for_rate(rate), cfg.m_for_rate(rate));
        for (trial, seed) in child_seeds(&mut master, cfg.trials, &mut seen)
            .into_iter()
            .enumerate()
        {
            jobs.push(Job {
                rate,
                n,
                m,
                trial,
                seed,
            });
        }
    }

    let outcomes: Vec<Result<(usize, usize, bool)>> =
        pool(cfg.workers)?.install(|| jobs.par_iter().map(|job| run_job(cfg, job)).collect());

    let mut details = Vec::with_capacity(jobs.len());
    let mut errors = Vec::new();
    for (job, outcome) in jobs.iter().zip(outcomes) {
        let row = DetailRow {
            p: cfg.p,
            rate: job.rate,
            n: job.n,
            m: job.m,
            trial: job.trial,
            seed: job.seed,
            iters: 0,
            converged: None,
            distortion_bits: None,
            distortion_per_bit: None,
        };
        details.push(match outcome {
            Ok((d, iters, converged)) => DetailRow {
                iters,
                converged: Some(converged),
                distortion_bits: Some(d),
                distortion_per_bit: Some(d as f64 / job.m as f64),
                ..row
            },
            Err(e) => {
                errors.push((job.rate, job.trial, e.to_string()));
                row
            }
        });
    }

    let mut aggregates = Vec::with_capacity(cfg.rates.len());
    for (i, &rate) in cfg.rates.iter().enumerate() {
        let rows = &details[i * cfg.trials..(i + 1) * cfg.trials];
        let values: Vec<f64> = rows.iter().filter_map(|r| r.distortion_per_bit).collect();
        let count = values.len();
        let mean = if count > 0 {
            values.iter().sum::<f64>() / count as f64
        } else {
            f64::NAN
        };
        let stderr = if count > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            0.0
        };
        aggregates.push(AggregateRow {
            p: cfg.p,
            rate,
            n: cfg.n_for_rate(rate),
            m: cfg.m_for_rate(rate),
            trials: count,
            mean_d: mean,
            stderr_d: stderr,
            rdf_d: rdf_inverse_saturating(cfg.p, rate)?,
            k: cfg.params.k,
            beta: cfg.params.beta,
            gamma: cfg.params.gamma,
        });
    }

    Ok(ExperimentResult {
        details,
        aggregates,
        errors,
    })
}

/// Parameter swept by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Gamma,
    Beta,
    K,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Gamma => "gamma",
            SweepAxis::Beta => "beta",
            SweepAxis::K => "k",
        }
    }

    fn apply(&self, params: &mut CodecParams<f64>, value: f64) {
        match self {
            SweepAxis::Gamma => params.gamma = value,
            SweepAxis::Beta => params.beta = value,
            SweepAxis::K => params.k = value,
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(SweepAxis::Gamma),
            "beta" => Ok(SweepAxis::Beta),
            "k" => Ok(SweepAxis::K),
            other => Err(Error::Config(format!(
                "unknown sweep axis {other:?} (expected gamma, beta or k)"
            ))),
        }
    }
}

/// Best grid value at one rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepBest {
    pub rate: f64,
    pub value: f64,
    pub mean_d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    /// One experiment per grid value, in grid order.
    pub runs: Vec<(f64, ExperimentResult)>,
    pub best: Vec<SweepBest>,
}

impl SweepResult {
    pub fn detail_csv(&self) -> String {
        let mut out = format!(
            "# plc sweep-detail v{SCHEMA_VERSION}\n{},{DETAIL_HEADER}\n",
            self.axis.name()
        );
        for (value, run) in &self.runs {
            for row in &run.details {
                let _ = writeln!(out, "{value},{}", row.csv_fields());
            }
        }
        out
    }

    pub fn aggregate_csv(&self) -> String {
        let mut out = format!(
            "# plc sweep-aggregate v{SCHEMA_VERSION}\n{},{AGGREGATE_HEADER}\n",
            self.axis.name()
        );
        for (value, run) in &self.runs {
            for row in &run.aggregates {
                let _ = writeln!(out, "{value},{}", row.csv_fields());
            }
        }
        out
    }

    pub fn best_csv(&self) -> String {
        let mut out = format!("R,best_{},mean_D\n", self.axis.name());
        for b in &self.best {
            let _ = writeln!(out, "{},{},{}", b.rate, b.value, b.mean_d);
        }
        out
    }
}

/// Runs [`run_experiment`] once per grid value with `axis` overridden. All
/// grid values share the master seed and therefore the same instances.
pub fn sweep(cfg: &ExperimentConfig, axis: SweepAxis, grid: &[f64]) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid must not be empty".into()));
    }
    let mut runs = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut c = cfg.clone();
        axis.apply(&mut c.params, value);
        runs.push((value, run_experiment(&c)?));
    }
    let best = cfg
        .rates
        .iter()
        .enumerate()
        .map(|(i, &rate)| {
            let (value, mean_d) = runs
                .iter()
                .map(|(v, run)| (*v, run.aggregates[i].mean_d))
                .fold((f64::NAN, f64::INFINITY), |best, cur| {
                    if cur.1 < best.1 {
                        cur
                    } else {
                        best
                    }
                });
            SweepBest {
                rate,
                value,
                mean_d,
            }
        })
        .collect();
    Ok(SweepResult { axis, runs, best })
}
