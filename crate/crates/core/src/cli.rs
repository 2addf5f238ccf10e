//! Config-file front end: single campaigns and one-axis sweeps persisted as
//! CSV and JSON.
//!
//! A config file is TOML (or JSON, e.g. a `resolved_config.json` from an
//! earlier run) holding [`SimConfig`] keys. Omitted keys take their defaults.
//! An optional `[sweep]` table turns the file into a sweep:
//!
//! ```toml
//! scheme = "reuse1"
//! n_k = 16
//!
//! [sweep]
//! axis = "tau"
//! values = [1, 2, 3, 4, 5, 6]
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};

use crate::engine::{run_campaign, CampaignResult, Percentiles, SimConfig};
use crate::error::{Error, Result};
use crate::srs_alloc::{ResourceKind, Scheme};

pub const SAMPLES_HEADER: [&str; 10] = [
    "drop",
    "bs",
    "ue",
    "scheme",
    "tau",
    "n_k",
    "protected_flag",
    "contamination_dbm",
    "sinr_db",
    "bs_throughput_mbps",
];

pub const TRADEOFF_HEADER: [&str; 9] = [
    "axis",
    "value",
    "scheme",
    "tau",
    "n_k",
    "protected_ues_per_bs",
    "contamination_median_dbm",
    "throughput_median_mbps",
    "invalid_drops",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Tau,
    Scheme,
    ProtectedUes,
    NK,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Tau => "tau",
            SweepAxis::Scheme => "scheme",
            SweepAxis::ProtectedUes => "protected_ues",
            SweepAxis::NK => "n_k",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Int(usize),
    Scheme(Scheme),
}

impl std::fmt::Display for SweepValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepValue::Int(v) => write!(f, "{v}"),
            SweepValue::Scheme(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepTable {
    axis: SweepAxis,
    values: Vec<SweepValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SimConfig,
    pub axis: SweepAxis,
    pub values: Vec<SweepValue>,
}

impl SweepSpec {
    /// The configuration of one sweep point.
    pub fn point(&self, value: &SweepValue) -> Result<SimConfig> {
        let mut c = self.base.clone();
        match (self.axis, value) {
            (SweepAxis::Tau, SweepValue::Int(v)) => c.tau = *v,
            (SweepAxis::NK, SweepValue::Int(v)) => c.n_k = *v,
            (SweepAxis::ProtectedUes, SweepValue::Int(v)) => c.protected_ues_per_bs = *v,
            (SweepAxis::Scheme, SweepValue::Scheme(s)) => c.scheme = *s,
            (axis, v) => {
                return Err(Error::InvalidParameter(format!(
                    "sweep value {v} does not fit axis {}",
                    axis.as_str()
                )))
            }
        }
        Ok(c)
    }

    /// All point configurations, each validated.
    pub fn points(&self) -> Result<Vec<SimConfig>> {
        if self.values.is_empty() {
            return Err(Error::InvalidParameter("sweep has no values".into()));
        }
        self.values
            .iter()
            .map(|v| {
                let c = self.point(v)?;
                c.validate().map_err(|e| match e {
                    Error::Budget(m) => Error::Budget(format!("{}={v}: {m}", self.axis.as_str())),
                    other => other,
                })?;
                Ok(c)
            })
            .collect()
    }

    fn dir_name(&self, value: &SweepValue) -> String {
        format!("{}-{value}", self.axis.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Single(SimConfig),
    Sweep(SweepSpec),
}

impl Job {
    fn for_each_config(&mut self, f: impl Fn(&mut SimConfig)) {
        match self {
            Job::Single(c) => f(c),
            Job::Sweep(s) => f(&mut s.base),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Job::Single(c) => c.validate(),
            Job::Sweep(s) => s.points().map(|_| ()),
        }
    }
}

fn config_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Line of the first `key = ...` assignment, for diagnostics on schema errors
/// reported without a position.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn with_line(text: &str, message: String) -> String {
    let key = message
        .split('`')
        .nth(1)
        .filter(|k| !k.is_empty())
        .and_then(|k| line_of_key(text, k));
    match key {
        Some(line) => format!("line {line}: {message}"),
        None => message,
    }
}

/// Parses a TOML or JSON document into a job. Syntax errors, duplicate and
/// unknown keys are all rejected. The sequence budget is not checked here.
pub fn parse_str(text: &str, json: bool, path: &Path) -> Result<Job> {
    if json {
        let config: SimConfig =
            serde_json::from_str(text).map_err(|e| config_error(path, e.to_string()))?;
        return Ok(Job::Single(config));
    }
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| config_error(path, e.to_string().trim_end().to_owned()))?;
    let sweep = table.remove("sweep");
    let config = SimConfig::deserialize(toml::Value::Table(table))
        .map_err(|e| config_error(path, with_line(text, e.message().to_owned())))?;
    match sweep {
        None => Ok(Job::Single(config)),
        Some(v) => {
            let s = SweepTable::deserialize(v)
                .map_err(|e| config_error(path, format!("[sweep]: {}", e.message())))?;
            Ok(Job::Sweep(SweepSpec {
                base: config,
                axis: s.axis,
                values: s.values,
            }))
        }
    }
}

/// Reads and parses a config file, then validates every configuration it
/// describes so infeasible budgets fail before anything runs.
pub fn parse_config(path: &Path) -> Result<Job> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let json = path.extension().is_some_and(|e| e == "json");
    let job = parse_str(&text, json, path)?;
    job.validate()?;
    Ok(job)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scheme: Scheme,
    pub tau: usize,
    pub n_k: usize,
    pub protected_ues_per_bs: usize,
    pub n_drops: usize,
    pub seed: u64,
    pub contamination_dbm: Percentiles,
    pub sinr_db: Percentiles,
    pub bs_throughput_mbps: Percentiles,
    pub invalid_drops: usize,
    pub wall_clock_s: f64,
}

impl Summary {
    pub fn of(result: &CampaignResult) -> Result<Self> {
        let c = &result.config;
        Ok(Self {
            scheme: c.scheme,
            tau: c.tau,
            n_k: c.n_k,
            protected_ues_per_bs: c.effective_protected(),
            n_drops: c.n_drops,
            seed: c.seed,
            contamination_dbm: result.contamination_percentiles()?,
            sinr_db: result.sinr_percentiles()?,
            bs_throughput_mbps: result.throughput_percentiles()?,
            invalid_drops: result.invalid_drops,
            wall_clock_s: result.wall_clock_s,
        })
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

pub fn write_samples(result: &CampaignResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(SAMPLES_HEADER).map_err(|e| csv_error(path, e))?;
    let c = &result.config;
    let scheme = c.scheme.as_str();
    for d in &result.drops {
        for u in &d.ues {
            let flag = u8::from(u.kind == ResourceKind::Protected);
            w.write_record([
                d.drop.to_string(),
                u.bs.to_string(),
                u.ue.to_string(),
                scheme.to_string(),
                c.tau.to_string(),
                c.n_k.to_string(),
                flag.to_string(),
                u.contamination_dbm().to_string(),
                u.sinr_db().to_string(),
                (d.bs_throughput[u.bs] / 1e6).to_string(),
            ])
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(io_error(path))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_error(path))
}

/// Runs one campaign and writes `samples.csv`, `summary.json` and
/// `resolved_config.json` into `dir`.
pub fn run_single(config: &SimConfig, dir: &Path) -> Result<Summary> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    write_json(config, &dir.join("resolved_config.json"))?;
    let result = run_campaign(config)?;
    let summary = Summary::of(&result)?;
    write_samples(&result, &dir.join("samples.csv"))?;
    write_json(&summary, &dir.join("summary.json"))?;
    Ok(summary)
}

/// Runs every sweep point in its own subdirectory and writes the combined
/// `tradeoff.csv` (median contamination against median BS throughput).
pub fn run_sweep(spec: &SweepSpec, dir: &Path, quiet: bool) -> Result<Vec<Summary>> {
    let configs = spec.points()?;
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let mut summaries = Vec::with_capacity(configs.len());
    for (value, config) in spec.values.iter().zip(&configs) {
        let s = run_single(config, &dir.join(spec.dir_name(value)))?;
        if !quiet {
            eprintln!("{}={value}: {}", spec.axis.as_str(), describe(&s));
        }
        summaries.push(s);
    }
    let path = dir.join("tradeoff.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
    w.write_record(TRADEOFF_HEADER).map_err(|e| csv_error(&path, e))?;
    for (value, s) in spec.values.iter().zip(&summaries) {
        w.write_record([
            spec.axis.as_str().to_string(),
            value.to_string(),
            s.scheme.to_string(),
            s.tau.to_string(),
            s.n_k.to_string(),
            s.protected_ues_per_bs.to_string(),
            s.contamination_dbm.p50.to_string(),
            s.bs_throughput_mbps.p50.to_string(),
            s.invalid_drops.to_string(),
        ])
        .map_err(|e| csv_error(&path, e))?;
    }
    w.flush().map_err(io_error(&path))?;
    Ok(summaries)
}

fn describe(s: &Summary) -> String {
    format!(
        "median contamination {:.2} dBm, median BS throughput {:.2} Mbit/s, {} invalid drops, {:.1} s",
        s.contamination_dbm.p50, s.bs_throughput_mbps.p50, s.invalid_drops, s.wall_clock_s
    )
}

#[derive(Debug, Parser)]
#[command(name = "srsim", version, about = "Massive-MIMO SRS allocation campaigns")]
pub struct Args {
    /// TOML or JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed in the file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the number of drops in the file.
    #[arg(long)]
    pub drops: Option<usize>,
    #[arg(long)]
    pub quiet: bool,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Loads the job described by `args`, with command-line overrides applied.
pub fn load(args: &Args) -> Result<Job> {
    let text = fs::read_to_string(&args.config).map_err(io_error(&args.config))?;
    let json = args.config.extension().is_some_and(|e| e == "json");
    let mut job = parse_str(&text, json, &args.config)?;
    let (seed, drops) = (args.seed, args.drops);
    job.for_each_config(|c| {
        if let Some(s) = seed {
            c.seed = s;
        }
        if let Some(d) = drops {
            c.n_drops = d;
        }
    });
    job.validate()?;
    Ok(job)
}

/// Runs the command line and returns the process exit code.
pub fn run(args: &Args) -> i32 {
    let job = match load(args) {
        Ok(job) => job,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let outcome = match &job {
        Job::Single(c) => run_single(c, &args.out).map(|s| {
            if !args.quiet {
                eprintln!("{}", describe(&s));
            }
        }),
        Job::Sweep(s) => run_sweep(s, &args.out, args.quiet).map(|_| ()),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}
