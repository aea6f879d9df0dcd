use detnet_envelope::envelope::dominance_at;
use detnet_envelope::queueing::pk_mean_sojourn;
use detnet_envelope::sim::{ExponentialService, Sojourns, default_warmup};
use detnet_envelope::{
    AggregationScenario, Mm1Params, PacketSizeDistribution, QuadraticModel, SimConfig, SweepPolicy, dimension_delay,
    empirical_quantiles, find_envelope_load, fit_quadratic, mm1_quantile, simulate_mg1, sweep_envelope,
    verify_dominance,
};

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn sfmix_at_seventy_percent_load() {
    let config = SimConfig::new(PacketSizeDistribution::sfmix(), 10e9, 0.7, 42);
    let sample = simulate_mg1(&config).unwrap();
    assert_eq!(sample.len(), 990_000);
    let ex = config.mean_service();
    assert!(rel(ex, 1.4e-6) < 0.001);
    assert!(rel(sample.mean().unwrap(), 5.34e-6) < 0.05);

    let env = find_envelope_load(sample.sojourns(), ex).unwrap();
    assert!((env.rho_env - 0.78).abs() <= 0.02 + 1e-12, "rho_env {}", env.rho_env);
    let check = verify_dominance(sample.sojourns(), &env, ex).unwrap();
    assert!(check.holds);
    let below = dominance_at(&env.real_quantiles, &env.percentile_grid, env.rho_env - 0.01, ex).unwrap();
    assert!(!below.holds);
}

#[test]
fn exponential_service_reproduces_mm1_quantiles() {
    let (ex, load, n) = (2e-6, 0.6, 2_000_000u64);
    let warm = default_warmup(n) as usize;
    let sojourns: Vec<f64> = Sojourns::new(ExponentialService::new(ex).unwrap(), load, 3)
        .unwrap()
        .skip(warm)
        .take(n as usize)
        .map(|d| d.sojourn())
        .collect();
    let probs = [0.5, 0.75, 0.9, 0.95, 0.99];
    let sim = empirical_quantiles(&sojourns, &probs).unwrap();
    let params = Mm1Params::new(ex, load).unwrap();
    for (p, s) in probs.iter().zip(&sim) {
        let exact = mm1_quantile(*p, params).unwrap();
        assert!(rel(*s, exact) < 0.02, "p={p}: {s} vs {exact}");
    }
}

#[test]
fn simulated_means_follow_pollaczek_khinchine() {
    for dist in [PacketSizeDistribution::trimodal(), PacketSizeDistribution::amsix()] {
        for load in [0.3, 0.6] {
            let config = SimConfig::new(dist.clone(), 1e9, load, 11).with_packets(2_000_000);
            let mean = simulate_mg1(&config).unwrap().mean().unwrap();
            let pk = pk_mean_sojourn(config.mean_service(), load, dist.scv()).unwrap();
            assert!(rel(mean, pk) < 0.02, "{} at {load}: {mean} vs {pk}", dist.name());
        }
    }
}

#[test]
fn fitted_model_feeds_dimensioning() {
    let dist = PacketSizeDistribution::trimodal();
    let loads: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let points = sweep_envelope(&dist, 10e9, &loads, &SweepPolicy::new(8).with_packets(200_000)).unwrap();
    assert!(points.windows(2).all(|w| w[1].rho_env >= w[0].rho_env));
    let model = fit_quadratic(&points).unwrap();
    assert_eq!(model.n_points, 9);
    assert!(model.rms.unwrap() < 0.03);

    let scenario = AggregationScenario::new(3000, 1e6, 0.8e6, 10e9);
    let fitted = dimension_delay(&scenario, &model, &dist, &[0.9, 0.99]).unwrap();
    let reference = dimension_delay(&scenario, &QuadraticModel::paper_trimodal(), &dist, &[0.9, 0.99]).unwrap();
    assert_eq!(fitted.rho_real, reference.rho_real);
    assert!((fitted.rho_env - reference.rho_env).abs() < 0.08);
}
