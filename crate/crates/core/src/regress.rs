//! Quadratic maps from real load to envelope load.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::distributions::PacketSizeDistribution;
use crate::envelope::{EnvelopeGrid, find_envelope_load_with};
use crate::rng::derive_seed;
use crate::sim::{DEFAULT_PACKETS, SimConfig, default_warmup, simulate_mg1};
use crate::{Error, Result};

/// Predictions are clamped to `[MIN_PREDICTION, MAX_PREDICTION]`.
pub const MIN_PREDICTION: f64 = 0.01;
pub const MAX_PREDICTION: f64 = 0.99;

/// Names accepted by [`QuadraticModel::builtin`].
pub const BUILTIN_MODELS: [&str; 3] = ["paper-trimodal", "paper-amsix", "paper-sfmix"];

/// `rho_env = c0 + c1·rho + c2·rho²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel {
    pub label: String,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Root-mean-square residual of the fit; `None` for published models.
    pub rms: Option<f64>,
    pub n_points: usize,
}

impl QuadraticModel {
    pub fn new(label: impl Into<String>, c0: f64, c1: f64, c2: f64) -> Self {
        Self { label: label.into(), c0, c1, c2, rms: None, n_points: 0 }
    }

    /// Published trimodal mapping.
    pub fn paper_trimodal() -> Self {
        Self::new("paper-trimodal", 0.49, 0.13, 0.39)
    }

    /// Published AMS-IX mapping.
    pub fn paper_amsix() -> Self {
        Self::new("paper-amsix", 0.43, 0.13, 0.47)
    }

    /// Published SFM-IX mapping, the worst case of the three.
    pub fn paper_sfmix() -> Self {
        Self::new("paper-sfmix", 0.50, 0.16, 0.34)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "paper-trimodal" => Some(Self::paper_trimodal()),
            "paper-amsix" => Some(Self::paper_amsix()),
            "paper-sfmix" => Some(Self::paper_sfmix()),
            _ => None,
        }
    }

    pub fn coefficients(&self) -> [f64; 3] {
        [self.c0, self.c1, self.c2]
    }

    /// Raw polynomial value, no domain check or clamp.
    pub fn evaluate(&self, rho: f64) -> f64 {
        self.c0 + rho * (self.c1 + rho * self.c2)
    }
}

pub fn predict(model: &QuadraticModel, rho_real: f64) -> Result<f64> {
    if !(rho_real > 0.0 && rho_real < 1.0) {
        return Err(Error::domain("rho_real", rho_real, "(0, 1)"));
    }
    let value = model.evaluate(rho_real);
    if !value.is_finite() {
        return Err(Error::domain("prediction", value, "finite"));
    }
    Ok(value.clamp(MIN_PREDICTION, MAX_PREDICTION))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub rho_real: f64,
    pub rho_env: f64,
    pub seed: u64,
    pub n_packets: u64,
}

/// Simulation settings shared by every point of a sweep. Point `i` runs
/// with seed `derive_seed(base_seed, i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPolicy {
    pub n_packets: u64,
    /// `None` uses [`default_warmup`].
    pub warmup_packets: Option<u64>,
    pub base_seed: u64,
    pub grid: EnvelopeGrid,
}

impl SweepPolicy {
    pub fn new(base_seed: u64) -> Self {
        Self { n_packets: DEFAULT_PACKETS, warmup_packets: None, base_seed, grid: EnvelopeGrid::default() }
    }

    pub fn with_packets(self, n_packets: u64) -> Self {
        Self { n_packets, ..self }
    }

    pub fn seed_for(&self, index: usize) -> u64 {
        derive_seed(self.base_seed, index as u64)
    }
}

/// `0.05, 0.10, …, 0.95`.
pub fn default_load_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 5.0 / 100.0).collect()
}

/// Simulates one load and searches its envelope.
pub fn sweep_point(
    dist: &PacketSizeDistribution,
    capacity_bps: f64,
    load: f64,
    index: usize,
    policy: &SweepPolicy,
) -> Result<SweepPoint> {
    let seed = policy.seed_for(index);
    let wrap = |e: Error| Error::Sweep { load, source: Box::new(e) };
    let config = SimConfig {
        capacity_bps,
        load,
        distribution: dist.clone(),
        n_packets: policy.n_packets,
        warmup_packets: policy.warmup_packets.unwrap_or_else(|| default_warmup(policy.n_packets)),
        seed,
    };
    let sample = simulate_mg1(&config).map_err(wrap)?;
    let result = find_envelope_load_with(sample.sojourns(), config.mean_service(), &policy.grid).map_err(wrap)?;
    Ok(SweepPoint { rho_real: load, rho_env: result.rho_env, seed, n_packets: policy.n_packets })
}

/// One [`SweepPoint`] per load, in grid order.
pub fn sweep_envelope(
    dist: &PacketSizeDistribution,
    capacity_bps: f64,
    loads: &[f64],
    policy: &SweepPolicy,
) -> Result<Vec<SweepPoint>> {
    loads.iter().enumerate().map(|(i, &load)| sweep_point(dist, capacity_bps, load, i, policy)).collect()
}

pub fn fit_quadratic(points: &[SweepPoint]) -> Result<QuadraticModel> {
    let xs: Vec<f64> = points.iter().map(|p| p.rho_real).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.rho_env).collect();
    fit_quadratic_xy(&xs, &ys)
}

/// Least squares on the basis `{1, x, x²}` via Householder QR, so the
/// normal equations (and their squared condition number) are never formed.
pub fn fit_quadratic_xy(xs: &[f64], ys: &[f64]) -> Result<QuadraticModel> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidConfig("abscissae and ordinates differ in length".to_string()));
    }
    if let Some(bad) = xs.iter().chain(ys).find(|v| !v.is_finite()) {
        return Err(Error::domain("fit input", *bad, "finite"));
    }
    let mut distinct = xs.to_vec();
    distinct.sort_unstable_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateDesign { distinct: distinct.len() });
    }

    let n = xs.len();
    // Column-major design matrix.
    let mut cols: [Vec<f64>; 3] = [alloc::vec![1.0; n], xs.to_vec(), xs.iter().map(|x| x * x).collect()];
    let mut rhs = ys.to_vec();

    for j in 0..3 {
        let norm = libm::sqrt(cols[j][j..].iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return Err(Error::DegenerateDesign { distinct: distinct.len() });
        }
        let alpha = if cols[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[j][j..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv > 0.0 {
            let reflect = |target: &mut [f64]| {
                let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
                let scale = 2.0 * dot / vv;
                target.iter_mut().zip(&v).for_each(|(t, vi)| *t -= scale * vi);
            };
            for col in cols.iter_mut().skip(j) {
                reflect(&mut col[j..]);
            }
            reflect(&mut rhs[j..]);
        }
    }

    let diag_max = (0..3).map(|j| libm::fabs(cols[j][j])).fold(0.0, f64::max);
    if (0..3).any(|j| libm::fabs(cols[j][j]) <= 1e-12 * diag_max) {
        return Err(Error::DegenerateDesign { distinct: distinct.len() });
    }

    let mut coef = [0.0; 3];
    for i in (0..3).rev() {
        let tail: f64 = (i + 1..3).map(|k| cols[k][i] * coef[k]).sum();
        coef[i] = (rhs[i] - tail) / cols[i][i];
    }

    let mut model = QuadraticModel::new("fitted", coef[0], coef[1], coef[2]);
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - model.evaluate(x);
            r * r
        })
        .sum();
    model.rms = Some(libm::sqrt(sse / n as f64));
    model.n_points = n;
    Ok(model)
}
