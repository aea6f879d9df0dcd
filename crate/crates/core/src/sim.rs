//! M/G/1 FIFO simulation by the Lindley recursion.
//!
//! With Poisson arrivals, one server and an infinite buffer, the waiting
//! time of packet `n+1` is `W(n+1) = max(0, W(n) + X(n) - A(n+1))`, where
//! `X(n)` is the service time of packet `n` and `A(n+1)` the gap between the
//! two arrivals. No event calendar is needed. [`Sojourns`] exposes the
//! recursion as an iterator. [`simulate_mg1`] runs it for a [`SimConfig`]
//! and keeps the post-warmup sojourn times.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand::distr::Distribution;
use rand_distr::Exp;

use crate::distributions::{PacketSizeDistribution, SizeSampler};
use crate::rng::{SimRng, Stream, stream_rng};
use crate::{Error, Result};

pub const DEFAULT_PACKETS: u64 = 1_000_000;

/// 1% of the run, at least 10⁴ packets, never more than a tenth of a short
/// run.
pub fn default_warmup(n_packets: u64) -> u64 {
    (n_packets / 100).max(10_000.min(n_packets / 10))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub capacity_bps: f64,
    /// Offered load `ρ = λ·E(X)`, strictly between 0 and 1.
    pub load: f64,
    pub distribution: PacketSizeDistribution,
    /// Packets generated, warmup included.
    pub n_packets: u64,
    /// Leading packets dropped from the sample.
    pub warmup_packets: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Config with [`DEFAULT_PACKETS`] packets and the default warmup.
    pub fn new(distribution: PacketSizeDistribution, capacity_bps: f64, load: f64, seed: u64) -> Self {
        Self {
            capacity_bps,
            load,
            distribution,
            n_packets: DEFAULT_PACKETS,
            warmup_packets: default_warmup(DEFAULT_PACKETS),
            seed,
        }
    }

    /// Sets the run length and resets the warmup to its default for it.
    pub fn with_packets(mut self, n_packets: u64) -> Self {
        self.n_packets = n_packets;
        self.warmup_packets = default_warmup(n_packets);
        self
    }

    pub fn with_warmup(mut self, warmup_packets: u64) -> Self {
        self.warmup_packets = warmup_packets;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.load > 0.0 && self.load < 1.0) {
            return Err(Error::domain("load", self.load, "(0, 1)"));
        }
        if !(self.capacity_bps.is_finite() && self.capacity_bps > 0.0) {
            return Err(Error::domain("capacity_bps", self.capacity_bps, "(0, inf)"));
        }
        if self.n_packets <= self.warmup_packets {
            return Err(Error::InvalidConfig(format!(
                "n_packets ({}) must exceed warmup_packets ({})",
                self.n_packets, self.warmup_packets
            )));
        }
        Ok(())
    }

    pub fn mean_service(&self) -> f64 {
        8.0 * self.distribution.mean_bytes() / self.capacity_bps
    }
}

/// Arrival intensity `λ = ρ/E(X) = ρ·C/(8·L̄)` in packets per second.
pub fn arrival_rate(config: &SimConfig) -> Result<f64> {
    config.validate()?;
    Ok(config.load / config.mean_service())
}

/// Source of i.i.d. service times in seconds.
pub trait ServiceTimes {
    fn mean(&self) -> f64;
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

/// Transmission times of packets drawn from a size distribution on a link.
#[derive(Debug, Clone)]
pub struct PacketService {
    sampler: SizeSampler,
    seconds: Vec<f64>,
    mean: f64,
}

impl PacketService {
    pub fn new(distribution: &PacketSizeDistribution, capacity_bps: f64) -> Self {
        let sampler = distribution.sampler();
        let seconds = sampler.sizes().iter().map(|s| 8.0 * s / capacity_bps).collect();
        Self { sampler, seconds, mean: 8.0 * distribution.mean_bytes() / capacity_bps }
    }
}

impl ServiceTimes for PacketService {
    fn mean(&self) -> f64 {
        self.mean
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.seconds[self.sampler.sample_index(rng)]
    }
}

/// Exponential service times, turning the simulator into an M/M/1 queue.
/// Used to check the recursion against closed forms.
#[derive(Debug, Clone, Copy)]
pub struct ExponentialService {
    mean: f64,
    dist: Exp<f64>,
}

impl ExponentialService {
    pub fn new(mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::domain("mean_service", mean, "(0, inf)"));
        }
        Ok(Self { mean, dist: Exp::new(1.0 / mean).expect("positive rate") })
    }
}

impl ServiceTimes for ExponentialService {
    fn mean(&self) -> f64 {
        self.mean
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.dist.sample(rng)
    }
}

/// One packet's delay components in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketDelay {
    pub wait: f64,
    pub service: f64,
}

impl PacketDelay {
    pub fn sojourn(&self) -> f64 {
        self.wait + self.service
    }
}

/// Endless stream of per-packet delays of an M/G/1 queue that starts empty.
pub struct Sojourns<S> {
    service: S,
    interarrival: Exp<f64>,
    arrivals: SimRng,
    services: SimRng,
    previous: Option<PacketDelay>,
}

impl<S: ServiceTimes> Sojourns<S> {
    /// Queue at load `load` with arrival rate `load / service.mean()`.
    pub fn new(service: S, load: f64, seed: u64) -> Result<Self> {
        if !(load > 0.0 && load < 1.0) {
            return Err(Error::domain("load", load, "(0, 1)"));
        }
        let rate = load / service.mean();
        Ok(Self {
            service,
            interarrival: Exp::new(rate).map_err(|_| Error::domain("arrival_rate", rate, "(0, inf)"))?,
            arrivals: stream_rng(seed, Stream::Arrivals),
            services: stream_rng(seed, Stream::Service),
            previous: None,
        })
    }
}

impl<S: ServiceTimes> Iterator for Sojourns<S> {
    type Item = PacketDelay;

    fn next(&mut self) -> Option<PacketDelay> {
        let wait = match self.previous {
            None => 0.0,
            Some(prev) => {
                let gap = self.interarrival.sample(&mut self.arrivals);
                (prev.wait + prev.service - gap).max(0.0)
            }
        };
        let service = self.service.sample(&mut self.services);
        let delay = PacketDelay { wait, service };
        self.previous = Some(delay);
        Some(delay)
    }
}

/// Post-warmup sojourn times of one simulation run, in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySample {
    sojourns: Vec<f64>,
    config: Option<SimConfig>,
}

impl DelaySample {
    /// Wraps externally produced delays (seconds). Values must be finite and
    /// non-negative.
    pub fn from_sojourns(sojourns: Vec<f64>) -> Result<Self> {
        if let Some(bad) = sojourns.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::domain("sojourn", *bad, "[0, inf)"));
        }
        Ok(Self { sojourns, config: None })
    }

    pub fn sojourns(&self) -> &[f64] {
        &self.sojourns
    }

    pub fn into_sojourns(self) -> Vec<f64> {
        self.sojourns
    }

    pub fn config(&self) -> Option<&SimConfig> {
        self.config.as_ref()
    }

    pub fn len(&self) -> usize {
        self.sojourns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sojourns.is_empty()
    }

    pub fn mean(&self) -> Result<f64> {
        if self.sojourns.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(self.sojourns.iter().sum::<f64>() / self.sojourns.len() as f64)
    }

    pub fn quantiles(&self, probs: &[f64]) -> Result<Vec<f64>> {
        empirical_quantiles(&self.sojourns, probs)
    }
}

pub fn simulate_mg1(config: &SimConfig) -> Result<DelaySample> {
    config.validate()?;
    let service = PacketService::new(&config.distribution, config.capacity_bps);
    let kept = (config.n_packets - config.warmup_packets) as usize;
    let sojourns = Sojourns::new(service, config.load, config.seed)?
        .skip(config.warmup_packets as usize)
        .take(kept)
        .map(|d| d.sojourn())
        .collect();
    Ok(DelaySample { sojourns, config: Some(config.clone()) })
}

/// Type-7 quantiles (linear interpolation between order statistics at
/// position `(n-1)p + 1`). `probs` must be ascending and in `[0, 1)`.
pub fn empirical_quantiles(data: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    check_probs(probs)?;
    let mut sorted = data.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(probs.iter().map(|&p| type7(&sorted, p)).collect())
}

/// [`empirical_quantiles`] on data the caller has already sorted.
pub fn sorted_quantiles(sorted: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    check_probs(probs)?;
    Ok(probs.iter().map(|&p| type7(sorted, p)).collect())
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if let Some(&p) = probs.iter().find(|p| !(0.0..1.0).contains(*p)) {
        return Err(Error::domain("probability", p, "[0, 1)"));
    }
    if probs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidConfig("probabilities must be ascending".into()));
    }
    Ok(())
}

fn type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
