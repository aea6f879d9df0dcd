//! Discrete packet-size distributions.
//!
//! A [`PacketSizeDistribution`] is a finite list of packet lengths in bytes
//! with their probabilities, kept sorted by size. It is the only source of
//! service-time randomness in the simulator: at link rate `C` a packet of
//! `L` bytes takes `8L/C` seconds to transmit.
//!
//! Three distributions are built in:
//!
//! * `trimodal`: 40, 576 and 1500 bytes with weights 7/12, 4/12, 1/12.
//! * `amsix`: mean 1019.03 B, standard deviation 1161.66 B.
//! * `sfmix`: mean 1750.41 B, standard deviation 2062.69 B.
//!
//! Only the first two moments of the exchange-point mixes are public, so
//! those two are built as the maximum-entropy distribution on
//! [`IXP_SUPPORT`] that reproduces both moments exactly (see
//! [`PacketSizeDistribution::max_entropy`]).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand::distr::Distribution;
use rand_distr::weighted::WeightedAliasIndex;

use crate::{Error, Result};

/// Probability mass must add up to one within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Loaded histograms whose mass lies in `1 ± RENORMALIZE_TOLERANCE` are
/// rescaled to sum to one; anything further off is rejected.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-3;

/// Smallest Ethernet frame, used as the low anchor of two-point fits.
pub const MIN_FRAME_BYTES: f64 = 64.0;

/// Support of the built-in exchange-point mixes: minimum frame, the classic
/// 576-byte datagram, the Ethernet MTU, and a jumbo frame.
pub const IXP_SUPPORT: [f64; 4] = [64.0, 576.0, 1500.0, 9000.0];

pub const AMSIX_MEAN_BYTES: f64 = 1019.03;
pub const AMSIX_SD_BYTES: f64 = 1161.66;
pub const SFMIX_MEAN_BYTES: f64 = 1750.41;
pub const SFMIX_SD_BYTES: f64 = 2062.69;

/// Names accepted by [`PacketSizeDistribution::builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["trimodal", "amsix", "sfmix"];

#[derive(Debug, Clone, PartialEq)]
pub struct PacketSizeDistribution {
    name: String,
    sizes: Vec<f64>,
    probs: Vec<f64>,
}

impl PacketSizeDistribution {
    /// Builds a distribution from `(size_bytes, probability)` pairs in any
    /// order. Probabilities must already sum to one within
    /// [`SUM_TOLERANCE`].
    pub fn new(name: impl Into<String>, entries: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (sizes, probs) = canonicalize(entries)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(Self { name: name.into(), sizes, probs })
    }

    /// Like [`new`](Self::new) but rescales the probabilities when their sum
    /// is within [`RENORMALIZE_TOLERANCE`] of one, which accepts rounded
    /// published histograms.
    pub fn renormalized(name: impl Into<String>, entries: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (sizes, mut probs) = canonicalize(entries)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, outside [{}, {}]",
                1.0 - RENORMALIZE_TOLERANCE,
                1.0 + RENORMALIZE_TOLERANCE
            )));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Self { name: name.into(), sizes, probs })
    }

    pub fn trimodal() -> Self {
        Self::new("trimodal", [(40.0, 7.0 / 12.0), (576.0, 4.0 / 12.0), (1500.0, 1.0 / 12.0)])
            .expect("trimodal mix is valid")
    }

    pub fn amsix() -> Self {
        Self::max_entropy("amsix", &IXP_SUPPORT, AMSIX_MEAN_BYTES, AMSIX_SD_BYTES)
            .expect("AMS-IX moments are interior to the support")
    }

    pub fn sfmix() -> Self {
        Self::max_entropy("sfmix", &IXP_SUPPORT, SFMIX_MEAN_BYTES, SFMIX_SD_BYTES)
            .expect("SFM-IX moments are interior to the support")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "trimodal" => Some(Self::trimodal()),
            "amsix" => Some(Self::amsix()),
            "sfmix" => Some(Self::sfmix()),
            _ => None,
        }
    }

    /// Two-point distribution `{anchor_small: p, s_big: 1-p}` with the given
    /// mean and standard deviation, where
    /// `s_big = mean + sd²/(mean - anchor_small)` and
    /// `p = (s_big - mean)/(s_big - anchor_small)`. A zero `sd` gives the
    /// single point at `mean`.
    pub fn moment_matched(mean: f64, sd: f64, anchor_small: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::InfeasibleMoments(format!("mean {mean} must be positive")));
        }
        if !(sd.is_finite() && sd >= 0.0) {
            return Err(Error::InfeasibleMoments(format!("sd {sd} must be non-negative")));
        }
        let name = format!("two-point(mean={mean},sd={sd},anchor={anchor_small})");
        if sd == 0.0 {
            return Self::new(name, [(mean, 1.0)]);
        }
        if !(anchor_small > 0.0 && anchor_small < mean) {
            return Err(Error::InfeasibleMoments(format!("anchor {anchor_small} must lie in (0, mean = {mean})")));
        }
        let big = mean + sd * sd / (mean - anchor_small);
        let p_small = (big - mean) / (big - anchor_small);
        if !(p_small > 0.0 && p_small < 1.0) || !big.is_finite() {
            return Err(Error::InfeasibleMoments(format!(
                "two-point solution has probability {p_small} at {anchor_small} B"
            )));
        }
        Self::new(name, [(anchor_small, p_small), (big, 1.0 - p_small)])
    }

    /// Maximum-entropy distribution on a fixed `support` with the given mean
    /// and standard deviation.
    ///
    /// The solution has the exponential-family form
    /// `p_i ∝ exp(a·x_i + b·x_i²)`. The natural parameters are found by
    /// Newton's method on the convex dual
    /// `log Σ exp(a·x_i + b·x_i²) − a·m₁ − b·m₂`, with sizes scaled to
    /// `[0, 1]` for conditioning.
    pub fn max_entropy(name: impl Into<String>, support: &[f64], mean: f64, sd: f64) -> Result<Self> {
        let mut sizes: Vec<f64> = support.to_vec();
        sizes.sort_by(f64::total_cmp);
        if sizes.len() < 3 || sizes.windows(2).any(|w| w[0] == w[1]) || sizes[0] <= 0.0 {
            return Err(Error::InfeasibleMoments(
                "max-entropy support needs at least 3 distinct positive sizes".to_string(),
            ));
        }
        let (lo, hi) = (sizes[0], sizes[sizes.len() - 1]);
        let second = sd * sd + mean * mean;
        // Interior of the moment space: lo < mean < hi, var > 0, and the
        // second moment strictly below the chord through the end points.
        let chord = (lo + hi) * mean - lo * hi;
        if !(mean > lo && mean < hi && sd > 0.0 && second < chord) {
            return Err(Error::InfeasibleMoments(format!(
                "mean {mean} / sd {sd} not attainable on support [{lo}, {hi}]"
            )));
        }

        let scale = hi;
        let xs: Vec<f64> = sizes.iter().map(|s| s / scale).collect();
        let target = [mean / scale, second / (scale * scale)];
        let (a, b) = newton_dual(&xs, target).ok_or_else(|| {
            Error::InfeasibleMoments(format!("max-entropy solve did not converge for mean {mean}, sd {sd}"))
        })?;
        let probs = gibbs(&xs, a, b);
        Self::new(name, sizes.into_iter().zip(probs))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `(size_bytes, probability)` pairs in increasing size order.
    pub fn entries(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.sizes.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn mean_bytes(&self) -> f64 {
        self.entries().map(|(s, p)| p * s).sum()
    }

    pub fn std_bytes(&self) -> f64 {
        libm::sqrt(self.variance())
    }

    /// Squared coefficient of variation. At a fixed link rate this equals
    /// the service-time SCV.
    pub fn scv(&self) -> f64 {
        let mean = self.mean_bytes();
        self.variance() / (mean * mean)
    }

    fn variance(&self) -> f64 {
        let mean = self.mean_bytes();
        // Centered form keeps the single-point case at exactly zero.
        self.entries().map(|(s, p)| p * (s - mean) * (s - mean)).sum()
    }

    pub fn sampler(&self) -> SizeSampler {
        SizeSampler {
            sizes: self.sizes.clone(),
            index: WeightedAliasIndex::new(self.probs.clone()).expect("validated weights"),
        }
    }

    /// Draws one packet size.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// O(1) alias-table sampler over a distribution's sizes.
#[derive(Debug, Clone)]
pub struct SizeSampler {
    sizes: Vec<f64>,
    index: WeightedAliasIndex<f64>,
}

impl SizeSampler {
    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    /// Index into [`sizes`](Self::sizes) of the next draw.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }
}

impl Distribution<f64> for SizeSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sizes[self.index.sample(rng)]
    }
}

fn canonicalize(entries: impl IntoIterator<Item = (f64, f64)>) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut pairs: Vec<(f64, f64)> = entries.into_iter().collect();
    if pairs.is_empty() {
        return Err(Error::InvalidDistribution("no entries".to_string()));
    }
    for &(size, prob) in &pairs {
        if !(size.is_finite() && size > 0.0) {
            return Err(Error::InvalidDistribution(format!("size {size} must be positive and finite")));
        }
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(Error::InvalidDistribution(format!("probability {prob} for size {size} outside (0, 1]")));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidDistribution(format!("duplicate size {}", w[0].0)));
    }
    Ok(pairs.into_iter().unzip())
}

fn gibbs(xs: &[f64], a: f64, b: f64) -> Vec<f64> {
    let logits: Vec<f64> = xs.iter().map(|x| a * x + b * x * x).collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logits.iter().map(|l| libm::exp(l - max)).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

fn dual_objective(xs: &[f64], a: f64, b: f64, target: [f64; 2]) -> f64 {
    let logits = xs.iter().map(|x| a * x + b * x * x);
    let max = logits.clone().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + libm::log(logits.map(|l| libm::exp(l - max)).sum::<f64>());
    lse - a * target[0] - b * target[1]
}

/// Damped Newton on the max-entropy dual. Returns the natural parameters.
fn newton_dual(xs: &[f64], target: [f64; 2]) -> Option<(f64, f64)> {
    let (mut a, mut b) = (0.0_f64, 0.0_f64);
    for _ in 0..500 {
        let p = gibbs(xs, a, b);
        let m1: f64 = p.iter().zip(xs).map(|(p, x)| p * x).sum();
        let m2: f64 = p.iter().zip(xs).map(|(p, x)| p * x * x).sum();
        let m3: f64 = p.iter().zip(xs).map(|(p, x)| p * x * x * x).sum();
        let m4: f64 = p.iter().zip(xs).map(|(p, x)| p * x * x * x * x).sum();
        let g = [m1 - target[0], m2 - target[1]];
        if libm::fabs(g[0]) < 1e-15 && libm::fabs(g[1]) < 1e-15 {
            return Some((a, b));
        }
        // Hessian is the covariance of (x, x²) under p.
        let h11 = m2 - m1 * m1;
        let h12 = m3 - m1 * m2;
        let h22 = m4 - m2 * m2;
        let det = h11 * h22 - h12 * h12;
        if det.is_nan() || det <= 0.0 || det.is_infinite() {
            return None;
        }
        let da = -(h22 * g[0] - h12 * g[1]) / det;
        let db = -(-h12 * g[0] + h11 * g[1]) / det;

        let f0 = dual_objective(xs, a, b, target);
        let slope = g[0] * da + g[1] * db;
        let mut step = 1.0;
        loop {
            let (na, nb) = (a + step * da, b + step * db);
            if dual_objective(xs, na, nb, target) <= f0 + 1e-4 * step * slope || step < 1e-12 {
                a = na;
                b = nb;
                break;
            }
            step *= 0.5;
        }
        if !(a.is_finite() && b.is_finite()) {
            return None;
        }
    }
    None
}
