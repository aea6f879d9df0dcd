//! Smallest dominating M/M/1 envelope of an empirical delay sample.
//!
//! The search keeps the real system's mean service time `E(X)` and scans
//! candidate loads upward. The candidate's sojourn law is exponential with
//! rate `(1-ρ)/E(X)`. The first candidate whose quantiles lie strictly above
//! the sample's quantiles at every grid percentile in `[0.50, 0.99]` is the
//! envelope.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::queueing::{Mm1Params, mm1_mean_sojourn, mm1_quantile};
use crate::sim::{empirical_quantiles, sorted_quantiles};
use crate::{Error, Result};

const LOWEST_PERCENTILE: f64 = 0.50;
const HIGHEST_PERCENTILE: f64 = 0.99;
const HIGHEST_LOAD: f64 = 0.99;

/// Resolution of the percentile grid and of the candidate loads, as the
/// number of steps per unit. The default of 100 gives the 0.01 grids
/// `0.50, 0.51, …, 0.99` and `0.01, 0.02, …, 0.99`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvelopeGrid {
    pub percentile_divisions: u32,
    pub load_divisions: u32,
}

impl Default for EnvelopeGrid {
    fn default() -> Self {
        Self { percentile_divisions: 100, load_divisions: 100 }
    }
}

impl EnvelopeGrid {
    /// Grid with candidate loads spaced by `step`, which must divide one.
    pub fn with_load_step(step: f64) -> Result<Self> {
        Ok(Self { load_divisions: divisions(step, "load_step")?, ..Self::default() })
    }

    pub fn with_percentile_step(self, step: f64) -> Result<Self> {
        Ok(Self { percentile_divisions: divisions(step, "percentile_step")?, ..self })
    }

    pub fn load_step(&self) -> f64 {
        1.0 / self.load_divisions as f64
    }

    pub fn percentiles(&self) -> Vec<f64> {
        let d = self.percentile_divisions;
        let lo = libm::ceil(LOWEST_PERCENTILE * d as f64 - 1e-9) as u32;
        let hi = libm::floor(HIGHEST_PERCENTILE * d as f64 + 1e-9) as u32;
        (lo..=hi).map(|k| k as f64 / d as f64).collect()
    }

    pub fn candidate_loads(&self) -> Vec<f64> {
        let d = self.load_divisions;
        let hi = libm::floor(HIGHEST_LOAD * d as f64 + 1e-9) as u32;
        (1..=hi).map(|k| k as f64 / d as f64).collect()
    }
}

fn divisions(step: f64, name: &'static str) -> Result<u32> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::domain(name, step, "(0, 0.5]"));
    }
    let inv = 1.0 / step;
    let rounded = libm::round(inv);
    if (inv - rounded).abs() > 1e-6 * rounded || rounded > 1e6 {
        return Err(Error::InvalidConfig(format!("{name} {step} must divide 1 evenly")));
    }
    Ok(rounded as u32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub rho: f64,
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub rho_env: f64,
    /// `E(X)/(1 - rho_env)`.
    pub mean_env: f64,
    pub mean_service: f64,
    pub percentile_grid: Vec<f64>,
    /// Sample quantiles at `percentile_grid`.
    pub real_quantiles: Vec<f64>,
    /// Every candidate tried, in search order; only the last one dominates.
    pub candidates: Vec<Candidate>,
    pub load_step: f64,
}

impl EnvelopeResult {
    pub fn params(&self) -> Mm1Params {
        Mm1Params::new(self.mean_service, self.rho_env).expect("search only yields valid loads")
    }

    /// Envelope quantiles at `percentile_grid`.
    pub fn grid_quantiles(&self) -> Vec<f64> {
        let params = self.params();
        self.percentile_grid.iter().map(|&p| mm1_quantile(p, params).expect("grid is inside [0, 1)")).collect()
    }
}

pub fn find_envelope_load(sojourns: &[f64], mean_service: f64) -> Result<EnvelopeResult> {
    find_envelope_load_with(sojourns, mean_service, &EnvelopeGrid::default())
}

pub fn find_envelope_load_with(sojourns: &[f64], mean_service: f64, grid: &EnvelopeGrid) -> Result<EnvelopeResult> {
    if sojourns.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(mean_service.is_finite() && mean_service > 0.0) {
        return Err(Error::domain("mean_service", mean_service, "(0, inf)"));
    }
    let percentile_grid = grid.percentiles();
    let mut sorted = sojourns.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let real_quantiles = sorted_quantiles(&sorted, &percentile_grid)?;

    let mut candidates = Vec::new();
    for rho in grid.candidate_loads() {
        let dominated = strictly_dominates(&real_quantiles, &percentile_grid, rho, mean_service)?;
        candidates.push(Candidate { rho, dominated });
        if dominated {
            let params = Mm1Params::new(mean_service, rho)?;
            return Ok(EnvelopeResult {
                rho_env: rho,
                mean_env: mm1_mean_sojourn(params),
                mean_service,
                percentile_grid,
                real_quantiles,
                candidates,
                load_step: grid.load_step(),
            });
        }
    }
    Err(Error::NoEnvelopeFound { max_candidate: HIGHEST_LOAD })
}

fn strictly_dominates(real: &[f64], probs: &[f64], rho: f64, mean_service: f64) -> Result<bool> {
    let params = Mm1Params::new(mean_service, rho)?;
    for (&p, &r) in probs.iter().zip(real) {
        if r.partial_cmp(&mm1_quantile(p, params)?) != Some(Ordering::Less) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Envelope sojourn quantiles at arbitrary probabilities.
pub fn envelope_quantiles(result: &EnvelopeResult, mean_service: f64, probs: &[f64]) -> Result<Vec<f64>> {
    let params = Mm1Params::new(mean_service, result.rho_env)?;
    probs.iter().map(|&p| mm1_quantile(p, params)).collect()
}

/// Outcome of comparing an M/M/1 candidate against sample quantiles.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceCheck {
    /// Envelope strictly above the sample at every grid point.
    pub holds: bool,
    /// `(p, envelope - sample)` per grid point, seconds.
    pub margins: Vec<(f64, f64)>,
    pub min_margin: f64,
}

/// Re-checks a search result against a delay sample.
pub fn verify_dominance(sojourns: &[f64], result: &EnvelopeResult, mean_service: f64) -> Result<DominanceCheck> {
    let real = empirical_quantiles(sojourns, &result.percentile_grid)?;
    dominance_at(&real, &result.percentile_grid, result.rho_env, mean_service)
}

/// Compares the M/M/1 queue `(mean_service, rho)` with precomputed sample
/// quantiles `real` at `probs`.
pub fn dominance_at(real: &[f64], probs: &[f64], rho: f64, mean_service: f64) -> Result<DominanceCheck> {
    if real.len() != probs.len() {
        return Err(Error::InvalidConfig(format!("{} quantiles for {} probabilities", real.len(), probs.len())));
    }
    let params = Mm1Params::new(mean_service, rho)?;
    let margins =
        probs.iter().zip(real).map(|(&p, &r)| Ok((p, mm1_quantile(p, params)? - r))).collect::<Result<Vec<_>>>()?;
    let min_margin = margins.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    Ok(DominanceCheck { holds: margins.iter().all(|m| m.1 > 0.0), margins, min_margin })
}
