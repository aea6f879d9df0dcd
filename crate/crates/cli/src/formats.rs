//! Text formats read and written by the tool.
//!
//! * Distribution file: one `size_bytes,probability` pair per line, `#`
//!   comments and blank lines ignored.
//! * Delay CSV: one sojourn time in seconds per line, scientific notation
//!   with 10 significant digits, no header.
//! * Sweep CSV: header `rho_real,rho_env,seed,n_packets`.
//! * Compare CSV: header
//!   `rho_real,sim_mean,sim_p90,sim_p99,env_mean,env_p90,env_p99`.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use detnet_envelope::{PacketSizeDistribution, SweepPoint};

use crate::error::{CliError, Result};

pub const SWEEP_HEADER: [&str; 4] = ["rho_real", "rho_env", "seed", "n_packets"];
pub const COMPARE_HEADER: [&str; 7] = ["rho_real", "sim_mean", "sim_p90", "sim_p99", "env_mean", "env_p90", "env_p99"];

pub fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| CliError::io(path, e))?;
        return Ok(text);
    }
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Parses the distribution file format. Probabilities summing to within
/// 0.1% of one are renormalised.
pub fn parse_distribution(name: &str, text: &str) -> Result<PacketSizeDistribution> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (size, prob) = line
            .split_once(',')
            .ok_or_else(|| CliError::parse(name, i + 1, format!("expected `size,probability`, got `{line}`")))?;
        let field = |s: &str, what: &str| {
            s.trim().parse::<f64>().map_err(|_| CliError::parse(name, i + 1, format!("bad {what} `{}`", s.trim())))
        };
        entries.push((field(size, "size")?, field(prob, "probability")?));
    }
    if entries.is_empty() {
        return Err(CliError::parse(name, 0, "no distribution entries"));
    }
    Ok(PacketSizeDistribution::renormalized(name, entries)?)
}

pub fn load_distribution(path: &Path) -> Result<PacketSizeDistribution> {
    let text = read_text(path)?;
    parse_distribution(&path.display().to_string(), &text)
}

pub fn write_distribution<W: Write>(mut out: W, dist: &PacketSizeDistribution) -> std::io::Result<()> {
    writeln!(out, "# {}", dist.name())?;
    for (size, prob) in dist.entries() {
        writeln!(out, "{size},{prob}")?;
    }
    Ok(())
}

pub fn write_delays<W: Write>(out: W, sojourns: &[f64]) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    for d in sojourns {
        writeln!(out, "{d:.9e}")?;
    }
    out.flush()
}

pub fn parse_delays(origin: &str, text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.trim().parse::<f64>().map_err(|_| CliError::parse(origin, i + 1, format!("bad delay `{}`", l.trim())))
        })
        .collect()
}

pub fn load_delays(path: &Path) -> Result<Vec<f64>> {
    parse_delays(&path.display().to_string(), &read_text(path)?)
}

pub fn write_sweep<W: Write>(out: W, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for p in points {
        w.write_record([p.rho_real.to_string(), p.rho_env.to_string(), p.seed.to_string(), p.n_packets.to_string()])?;
    }
    w.flush().map_err(|e| CliError::io("<sweep>", e))
}

pub fn parse_sweep(origin: &str, text: &str) -> Result<Vec<SweepPoint>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().ne(SWEEP_HEADER) {
        return Err(CliError::parse(origin, 1, format!("expected header {}", SWEEP_HEADER.join(","))));
    }
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let num = |k: usize| {
            record[k].parse::<f64>().map_err(|_| CliError::parse(origin, line, format!("bad {}", SWEEP_HEADER[k])))
        };
        let int = |k: usize| {
            record[k].parse::<u64>().map_err(|_| CliError::parse(origin, line, format!("bad {}", SWEEP_HEADER[k])))
        };
        points.push(SweepPoint { rho_real: num(0)?, rho_env: num(1)?, seed: int(2)?, n_packets: int(3)? });
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub rho_real: f64,
    pub sim_mean: f64,
    pub sim_p90: f64,
    pub sim_p99: f64,
    pub env_mean: f64,
    pub env_p90: f64,
    pub env_p99: f64,
}

impl CompareRow {
    pub fn simulated_within_envelope(&self) -> bool {
        self.sim_mean <= self.env_mean && self.sim_p90 <= self.env_p90 && self.sim_p99 <= self.env_p99
    }
}

pub fn write_compare<W: Write>(out: W, rows: &[CompareRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARE_HEADER)?;
    for r in rows {
        let secs = [r.sim_mean, r.sim_p90, r.sim_p99, r.env_mean, r.env_p90, r.env_p99];
        let mut record = vec![r.rho_real.to_string()];
        record.extend(secs.iter().map(|s| format!("{s:.9e}")));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| CliError::io("<compare>", e))
}

pub fn parse_compare(origin: &str, text: &str) -> Result<Vec<CompareRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    if reader.headers()?.iter().ne(COMPARE_HEADER) {
        return Err(CliError::parse(origin, 1, format!("expected header {}", COMPARE_HEADER.join(","))));
    }
    reader
        .records()
        .enumerate()
        .map(|(i, record)| {
            let record = record?;
            let v: Vec<f64> = record
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| CliError::parse(origin, i + 2, format!("bad number `{f}`"))))
                .collect::<Result<_>>()?;
            Ok(CompareRow {
                rho_real: v[0],
                sim_mean: v[1],
                sim_p90: v[2],
                sim_p99: v[3],
                env_mean: v[4],
                env_p90: v[5],
                env_p99: v[6],
            })
        })
        .collect()
}
