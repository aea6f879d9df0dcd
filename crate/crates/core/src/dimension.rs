//! Delay guarantees for an aggregation node.
//!
//! `N` independent users with per-user rate mean `μ` and standard deviation
//! `σ` add up (central limit theorem) to a Gaussian aggregate
//! `N(Nμ, Nσ²)`. The node is dimensioned for the peak `Nμ + k·√N·σ`. That
//! peak over the link capacity is the real load. A [`QuadraticModel`] maps
//! it to an envelope load, and the M/M/1 closed forms at that load give the
//! guaranteed mean delay and percentiles.

use alloc::vec::Vec;

use crate::distributions::PacketSizeDistribution;
use crate::queueing::{Mm1Params, mm1_mean_sojourn, mm1_quantile, service_time};
use crate::regress::{QuadraticModel, predict};
use crate::{Error, Result};

pub const DEFAULT_SIGMA_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregationScenario {
    pub n_users: u64,
    pub user_mean_bps: f64,
    pub user_sd_bps: f64,
    pub capacity_bps: f64,
    /// Standard deviations of headroom above the aggregate mean.
    pub sigma_multiplier: f64,
}

impl AggregationScenario {
    pub fn new(n_users: u64, user_mean_bps: f64, user_sd_bps: f64, capacity_bps: f64) -> Self {
        Self { n_users, user_mean_bps, user_sd_bps, capacity_bps, sigma_multiplier: DEFAULT_SIGMA_MULTIPLIER }
    }

    pub fn with_sigma_multiplier(self, k: f64) -> Self {
        Self { sigma_multiplier: k, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.n_users == 0 {
            return Err(Error::domain("n_users", 0.0, "[1, inf)"));
        }
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 { Ok(()) } else { Err(Error::domain(name, v, "(0, inf)")) }
        };
        let non_negative = |name, v: f64| {
            if v.is_finite() && v >= 0.0 { Ok(()) } else { Err(Error::domain(name, v, "[0, inf)")) }
        };
        positive("user_mean_bps", self.user_mean_bps)?;
        positive("capacity_bps", self.capacity_bps)?;
        non_negative("user_sd_bps", self.user_sd_bps)?;
        non_negative("sigma_multiplier", self.sigma_multiplier)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregatePeak {
    pub mean_bps: f64,
    pub sd_bps: f64,
    pub peak_bps: f64,
}

pub fn aggregate_peak(scenario: &AggregationScenario) -> Result<AggregatePeak> {
    scenario.validate()?;
    let n = scenario.n_users as f64;
    let mean_bps = n * scenario.user_mean_bps;
    let sd_bps = libm::sqrt(n) * scenario.user_sd_bps;
    Ok(AggregatePeak { mean_bps, sd_bps, peak_bps: mean_bps + scenario.sigma_multiplier * sd_bps })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub aggregate_mean_bps: f64,
    pub aggregate_sd_bps: f64,
    pub peak_bps: f64,
    pub rho_real: f64,
    pub rho_env: f64,
    pub mean_service_s: f64,
    pub mean_delay_s: f64,
    /// `(q, D_q)` in the order requested.
    pub percentiles: Vec<(f64, f64)>,
}

pub fn dimension_delay(
    scenario: &AggregationScenario,
    model: &QuadraticModel,
    dist: &PacketSizeDistribution,
    quantiles: &[f64],
) -> Result<DimensionReport> {
    let peak = aggregate_peak(scenario)?;
    if peak.peak_bps >= scenario.capacity_bps {
        return Err(Error::Unstable { peak_bps: peak.peak_bps, capacity_bps: scenario.capacity_bps });
    }
    let rho_real = peak.peak_bps / scenario.capacity_bps;
    let rho_env = predict(model, rho_real)?;
    let mean_service_s = service_time(dist.mean_bytes(), scenario.capacity_bps)?;
    let params = Mm1Params::new(mean_service_s, rho_env)?;
    let percentiles = quantiles.iter().map(|&q| Ok((q, mm1_quantile(q, params)?))).collect::<Result<Vec<_>>>()?;
    Ok(DimensionReport {
        aggregate_mean_bps: peak.mean_bps,
        aggregate_sd_bps: peak.sd_bps,
        peak_bps: peak.peak_bps,
        rho_real,
        rho_env,
        mean_service_s,
        mean_delay_s: mm1_mean_sojourn(params),
        percentiles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn households() -> AggregationScenario {
        AggregationScenario::new(3000, 1e6, 0.8e6, 10e9)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn household_aggregate() {
        let peak = aggregate_peak(&households()).unwrap();
        assert_eq!(peak.mean_bps, 3e9);
        assert!(rel(peak.sd_bps, 0.044e9) < 0.01);
        assert!(rel(peak.peak_bps, 3.13e9) < 0.003);
    }

    #[test]
    fn degenerate_aggregates() {
        let s = AggregationScenario::new(40, 2e6, 0.0, 1e9);
        assert_eq!(aggregate_peak(&s).unwrap().peak_bps, 80e6);
        let s = AggregationScenario::new(1, 5.0, 1.5, 100.0).with_sigma_multiplier(2.0);
        assert_eq!(aggregate_peak(&s).unwrap().peak_bps, 8.0);
        assert!(aggregate_peak(&AggregationScenario::new(0, 1.0, 0.0, 10.0)).is_err());
        assert!(aggregate_peak(&AggregationScenario::new(1, 1.0, -1.0, 10.0)).is_err());
    }

    #[test]
    fn household_report() {
        let r = dimension_delay(
            &households(),
            &QuadraticModel::paper_sfmix(),
            &PacketSizeDistribution::sfmix(),
            &[0.90, 0.99],
        )
        .unwrap();
        assert!((r.rho_real - 0.313).abs() <= 0.001);
        assert!((r.rho_env - 0.583).abs() <= 0.001);
        assert!(rel(r.mean_delay_s, 3.35e-6) < 0.01);
        assert!(rel(r.percentiles[0].1, 7.71e-6) < 0.01);
        assert!(rel(r.percentiles[1].1, 15.43e-6) < 0.01);
    }

    #[test]
    fn unstable_when_peak_reaches_capacity() {
        let s = AggregationScenario { capacity_bps: 3e9, ..households() };
        let err = dimension_delay(&s, &QuadraticModel::paper_sfmix(), &PacketSizeDistribution::sfmix(), &[0.9]);
        assert!(matches!(err, Err(Error::Unstable { .. })));
    }

    #[test]
    fn zero_headroom_gives_mean_load() {
        let s = AggregationScenario { user_sd_bps: 0.0, ..households() }.with_sigma_multiplier(0.0);
        let r = dimension_delay(&s, &QuadraticModel::paper_sfmix(), &PacketSizeDistribution::sfmix(), &[]).unwrap();
        assert_eq!(r.rho_real, 0.3);
    }

    #[test]
    fn identity_model_passes_load_through() {
        let dist = PacketSizeDistribution::trimodal();
        let id = QuadraticModel::new("identity", 0.0, 1.0, 0.0);
        let r = dimension_delay(&households(), &id, &dist, &[0.5, 0.9]).unwrap();
        assert_eq!(r.rho_env, r.rho_real);
        let params = Mm1Params::new(r.mean_service_s, r.rho_real).unwrap();
        for (q, d) in &r.percentiles {
            assert_eq!(*d, mm1_quantile(*q, params).unwrap());
        }
    }

    proptest! {
        #[test]
        fn report_is_exponential_and_scales_with_capacity(
            n in 1u64..100_000, mean in 1e3f64..1e7, sd in 0.0f64..1e7, k in 0.0f64..5.0, headroom in 1.05f64..20.0,
        ) {
            let peak = aggregate_peak(&AggregationScenario::new(n, mean, sd, 1.0).with_sigma_multiplier(k)).unwrap();
            let s = AggregationScenario::new(n, mean, sd, peak.peak_bps * headroom).with_sigma_multiplier(k);
            let dist = PacketSizeDistribution::sfmix();
            let model = QuadraticModel::paper_sfmix();
            let qs = [0.5, 0.9, 0.99, 0.999];
            let r = dimension_delay(&s, &model, &dist, &qs).unwrap();
            for w in r.percentiles.windows(2) {
                prop_assert!(w[1].1 > w[0].1);
            }
            for (q, d) in &r.percentiles {
                let expected = r.mean_delay_s * -(1.0 - q).ln();
                prop_assert!((d - expected).abs() <= 1e-12 * expected.max(1e-300) + 1e-24);
            }

            let doubled = AggregationScenario {
                user_mean_bps: 2.0 * mean, user_sd_bps: 2.0 * sd, capacity_bps: 2.0 * s.capacity_bps, ..s
            };
            // √N·2σ doubles like the rest, so loads are unchanged.
            let r2 = dimension_delay(&doubled, &model, &dist, &qs).unwrap();
            prop_assert!((r2.rho_real - r.rho_real).abs() < 1e-12);
            prop_assert!((r2.rho_env - r.rho_env).abs() < 1e-12);
            prop_assert!((r2.mean_delay_s * 2.0 / r.mean_delay_s - 1.0).abs() < 1e-12);
        }
    }
}
