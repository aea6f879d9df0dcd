//! Independent per-load simulations run on the rayon pool.

use detnet_envelope::queueing::{Mm1Params, mm1_mean_sojourn, mm1_quantile};
use detnet_envelope::regress::sweep_point;
use detnet_envelope::rng::derive_seed;
use detnet_envelope::sim::{SimConfig, default_warmup, simulate_mg1};
use detnet_envelope::{PacketSizeDistribution, QuadraticModel, SweepPoint, SweepPolicy, predict};
use rayon::prelude::*;

use crate::formats::CompareRow;

/// Same points as `detnet_envelope::sweep_envelope`, computed in parallel.
pub fn par_sweep(
    dist: &PacketSizeDistribution,
    capacity_bps: f64,
    loads: &[f64],
    policy: &SweepPolicy,
) -> detnet_envelope::Result<Vec<SweepPoint>> {
    loads.par_iter().enumerate().map(|(i, &load)| sweep_point(dist, capacity_bps, load, i, policy)).collect()
}

/// Simulated mean/p90/p99 against the envelope that `model` predicts, one
/// row per load. Row `i` simulates with seed `derive_seed(base_seed, i)`.
pub fn compare_rows(
    dist: &PacketSizeDistribution,
    capacity_bps: f64,
    loads: &[f64],
    model: &QuadraticModel,
    n_packets: u64,
    base_seed: u64,
) -> detnet_envelope::Result<Vec<CompareRow>> {
    loads
        .par_iter()
        .enumerate()
        .map(|(i, &load)| {
            let config = SimConfig {
                capacity_bps,
                load,
                distribution: dist.clone(),
                n_packets,
                warmup_packets: default_warmup(n_packets),
                seed: derive_seed(base_seed, i as u64),
            };
            let sample = simulate_mg1(&config)?;
            let sim = sample.quantiles(&[0.90, 0.99])?;
            let env = Mm1Params::new(config.mean_service(), predict(model, load)?)?;
            Ok(CompareRow {
                rho_real: load,
                sim_mean: sample.mean()?,
                sim_p90: sim[0],
                sim_p99: sim[1],
                env_mean: mm1_mean_sojourn(env),
                env_p90: mm1_quantile(0.90, env)?,
                env_p99: mm1_quantile(0.99, env)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_sweep_matches_sequential() {
        let dist = PacketSizeDistribution::amsix();
        let policy = SweepPolicy::new(5).with_packets(30_000);
        let loads = [0.2, 0.5, 0.8];
        assert_eq!(
            par_sweep(&dist, 1e9, &loads, &policy).unwrap(),
            detnet_envelope::sweep_envelope(&dist, 1e9, &loads, &policy).unwrap()
        );
    }
}
