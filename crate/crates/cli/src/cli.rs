//! Command-line arguments. Every argument struct is also serde-serialisable,
//! so a run manifest stores the exact resolved arguments for replay.

use std::path::PathBuf;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand};
use detnet_envelope::distributions::BUILTIN_NAMES;
use detnet_envelope::regress::BUILTIN_MODELS;
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "DETNET_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "detnet-envelope", version, about = "M/M/1 delay envelopes for M/G/1 packet queues")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Simulate an M/G/1 queue and write its sojourn times.
    Simulate(SimulateArgs),
    /// Find the smallest dominating M/M/1 envelope of a delay sample.
    Envelope(EnvelopeArgs),
    /// Sweep loads, find envelopes and fit the quadratic load map.
    Fit(FitArgs),
    /// Closed-form M/M/1 (and optional Pollaczek-Khinchine) delays.
    Analyze(AnalyzeArgs),
    /// Delay guarantees for an aggregation of many users.
    Dimension(DimensionArgs),
    /// Simulated vs envelope mean, p90 and p99 over a load grid.
    Compare(CompareArgs),
    /// Re-run a command from a manifest file.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Envelope(_) => "envelope",
            Command::Fit(_) => "fit",
            Command::Analyze(_) => "analyze",
            Command::Dimension(_) => "dimension",
            Command::Compare(_) => "compare",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DistArgs {
    /// Built-in packet-size distribution.
    #[arg(long, value_parser = PossibleValuesParser::new(BUILTIN_NAMES), conflicts_with = "dist_file")]
    pub dist: Option<String>,
    /// Distribution file: `size_bytes,probability` per line.
    #[arg(long)]
    pub dist_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Built-in load map.
    #[arg(long, value_parser = PossibleValuesParser::new(BUILTIN_MODELS), conflicts_with = "model_file")]
    pub model: Option<String>,
    /// Model JSON as written by `fit --model-out`.
    #[arg(long)]
    pub model_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Link capacity, bits per second.
    #[arg(long, default_value_t = 10e9)]
    pub capacity: f64,
    #[arg(long)]
    pub load: f64,
    /// Simulated packets including warmup (scientific notation allowed).
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    pub packets: u64,
    /// Discarded packets before recording; default max(1%, min(10^4, 10%)).
    #[arg(long, value_parser = parse_count)]
    pub warmup: Option<u64>,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Percentiles reported in the summary.
    #[arg(long, value_parser = parse_probs, default_value = "0.5,0.9,0.99")]
    pub q: ProbList,
    /// Delay CSV (one sojourn per line, seconds).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON; stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EnvelopeArgs {
    /// Delay CSV, `-` for stdin.
    #[arg(long)]
    pub input: PathBuf,
    /// Mean service time E(X), seconds. Taken from the input's manifest
    /// when neither this nor a distribution is given.
    #[arg(long, conflicts_with_all = ["dist", "dist_file"])]
    pub ex: Option<f64>,
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, default_value_t = 10e9)]
    pub capacity: f64,
    /// Candidate load spacing; must divide 1.
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    /// Output JSON; stdout when absent.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, default_value_t = 10e9)]
    pub capacity: f64,
    /// Loads as `start:stop:step` or a comma list.
    #[arg(long, value_parser = parse_grid, default_value = "0.05:0.95:0.05")]
    pub grid: LoadGrid,
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    pub packets: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    /// Fit an existing sweep CSV (`-` for stdin) instead of simulating.
    #[arg(long, conflicts_with_all = ["dist", "dist_file"])]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub sweep_out: Option<PathBuf>,
    /// Model JSON; stdout when absent.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    /// Mean service time E(X), seconds.
    #[arg(long)]
    pub ex: f64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, value_parser = parse_probs, default_value = "0.5,0.9,0.99")]
    pub q: ProbList,
    /// Service-time SCV; adds the Pollaczek-Khinchine mean sojourn.
    #[arg(long)]
    pub scv: Option<f64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DimensionArgs {
    #[arg(long)]
    pub users: u64,
    /// Per-user mean rate, bits per second.
    #[arg(long)]
    pub user_mean: f64,
    /// Per-user rate standard deviation, bits per second.
    #[arg(long)]
    pub user_sd: f64,
    /// Headroom in aggregate standard deviations.
    #[arg(long, default_value_t = detnet_envelope::dimension::DEFAULT_SIGMA_MULTIPLIER)]
    pub k: f64,
    #[arg(long, default_value_t = 10e9)]
    pub capacity: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, value_parser = parse_probs, default_value = "0.9,0.99")]
    pub q: ProbList,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, default_value_t = 10e9)]
    pub capacity: f64,
    #[arg(long, value_parser = parse_grid, default_value = "0.1:0.9:0.1")]
    pub grid: LoadGrid,
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    pub packets: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Load map for the envelope; fitted over 0.05..0.95 when absent.
    #[command(flatten)]
    pub model: ModelArgs,
    /// Writes the fitted model, when one is fitted.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Compare CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest JSON, or any JSON output that embeds one.
    pub manifest: PathBuf,
    /// Redirects the primary output (delay, sweep or compare CSV).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbList(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LoadGrid(pub Vec<f64>);

/// Non-negative integer, accepting forms like `1e6` and `2.5e5`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 0.0 && v.fract() == 0.0 && v <= 9_007_199_254_740_992.0 {
        Ok(v as u64)
    } else {
        Err(format!("`{s}` is not a non-negative integer"))
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if v.is_finite() { Ok(v) } else { Err(format!("`{s}` is not finite")) }
}

pub fn parse_probs(s: &str) -> Result<ProbList, String> {
    let probs = s.split(',').filter(|t| !t.trim().is_empty()).map(parse_f64).collect::<Result<Vec<_>, _>>()?;
    if let Some(p) = probs.iter().find(|p| !(0.0..1.0).contains(*p)) {
        return Err(format!("percentile {p} is outside [0, 1)"));
    }
    Ok(ProbList(probs))
}

/// `start:stop:step` (inclusive of `stop` up to rounding) or `a,b,c`.
pub fn parse_grid(s: &str) -> Result<LoadGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let loads = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_f64(start)?, parse_f64(stop)?, parse_f64(step)?);
            if step <= 0.0 || stop < start {
                return Err(format!("`{s}` needs start <= stop and step > 0"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as u64;
            // Round to 12 decimals so 0.1*3 prints as 0.3 in outputs.
            (0..=n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
        }
        [list] => list.split(',').filter(|t| !t.trim().is_empty()).map(parse_f64).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("`{s}` is neither start:stop:step nor a comma list")),
    };
    if loads.is_empty() {
        return Err("empty load grid".into());
    }
    Ok(LoadGrid(loads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("2.5e5"), Ok(250_000));
        assert_eq!(parse_count("123"), Ok(123));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-1").is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("0.05:0.95:0.05").unwrap().0;
        assert_eq!(g.len(), 19);
        assert_eq!((g[0], g[2], g[18]), (0.05, 0.15, 0.95));
        assert_eq!(parse_grid("0.1:0.9:0.1").unwrap().0, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
        assert_eq!(parse_grid("0.5").unwrap().0, vec![0.5]);
        assert_eq!(parse_grid("0.2,0.8").unwrap().0, vec![0.2, 0.8]);
        assert!(parse_grid("0.9:0.1:0.1").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn probabilities() {
        assert_eq!(parse_probs("0.9,0.99").unwrap().0, vec![0.9, 0.99]);
        assert!(parse_probs("1").is_err());
    }

    #[test]
    fn arguments_round_trip_through_json() {
        let cli = Cli::try_parse_from([
            "detnet-envelope",
            "simulate",
            "--dist",
            "sfmix",
            "--capacity",
            "10e9",
            "--load",
            "0.7",
            "--packets",
            "1e6",
            "--seed",
            "42",
        ])
        .unwrap();
        let Command::Simulate(args) = cli.command else { panic!() };
        assert_eq!((args.capacity, args.packets, args.seed), (10e9, 1_000_000, 42));
        let json = serde_json::to_value(&args).unwrap();
        let back: SimulateArgs = serde_json::from_value(json).unwrap();
        assert_eq!(back.dist.dist.as_deref(), Some("sfmix"));
        assert_eq!(back.q, args.q);
    }
}
