//! Closed-form M/M/1 and M/G/1 results.
//!
//! Every "delay" here is a sojourn time: queueing wait plus transmission.
//! [`pk_mean_wait`] is the one wait-only quantity.

use crate::{Error, Result};

/// Mean transmission time in seconds of a `mean_bytes` packet on a
/// `capacity_bps` link.
pub fn service_time(mean_bytes: f64, capacity_bps: f64) -> Result<f64> {
    if !(mean_bytes.is_finite() && mean_bytes > 0.0) {
        return Err(Error::domain("mean_bytes", mean_bytes, "(0, inf)"));
    }
    if !(capacity_bps.is_finite() && capacity_bps > 0.0) {
        return Err(Error::domain("capacity_bps", capacity_bps, "(0, inf)"));
    }
    Ok(8.0 * mean_bytes / capacity_bps)
}

/// An M/M/1 queue described by its mean service time and load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mm1Params {
    mean_service: f64,
    load: f64,
}

impl Mm1Params {
    pub fn new(mean_service: f64, load: f64) -> Result<Self> {
        if !(mean_service.is_finite() && mean_service > 0.0) {
            return Err(Error::domain("mean_service", mean_service, "(0, inf)"));
        }
        if !(0.0..1.0).contains(&load) {
            return Err(Error::domain("load", load, "[0, 1)"));
        }
        Ok(Self { mean_service, load })
    }

    pub fn mean_service(&self) -> f64 {
        self.mean_service
    }

    pub fn load(&self) -> f64 {
        self.load
    }

    /// Rate of the exponential sojourn law, `(1 - ρ)/E(X)`.
    pub fn sojourn_rate(&self) -> f64 {
        (1.0 - self.load) / self.mean_service
    }
}

/// `P(D ≤ t) = 1 - exp(-(1-ρ) t / E(X))`.
pub fn mm1_sojourn_cdf(t: f64, params: Mm1Params) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain("t", t, "[0, inf)"));
    }
    Ok(-libm::expm1(-params.sojourn_rate() * t))
}

/// `D_q = E(X)/(1-ρ) · ln(1/(1-q))`, the exact inverse of
/// [`mm1_sojourn_cdf`].
pub fn mm1_quantile(q: f64, params: Mm1Params) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::domain("q", q, "[0, 1)"));
    }
    Ok(-libm::log1p(-q) / params.sojourn_rate())
}

pub fn mm1_mean_sojourn(params: Mm1Params) -> f64 {
    params.mean_service / (1.0 - params.load)
}

/// Pollaczek–Khintchine mean waiting time in queue,
/// `E(X) · ρ/(1-ρ) · (1 + C²)/2`.
pub fn pk_mean_wait(mean_service: f64, load: f64, scv: f64) -> Result<f64> {
    let params = Mm1Params::new(mean_service, load)?;
    if !(scv.is_finite() && scv >= 0.0) {
        return Err(Error::domain("scv", scv, "[0, inf)"));
    }
    Ok(params.mean_service * load / (1.0 - load) * (1.0 + scv) / 2.0)
}

/// Mean M/G/1 sojourn: P-K wait plus one mean service time.
pub fn pk_mean_sojourn(mean_service: f64, load: f64, scv: f64) -> Result<f64> {
    Ok(pk_mean_wait(mean_service, load, scv)? + mean_service)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const US: f64 = 1e-6;

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    fn p(ex: f64, rho: f64) -> Mm1Params {
        Mm1Params::new(ex, rho).unwrap()
    }

    #[test]
    fn service_time_examples() {
        assert!(rel(service_time(1750.41, 10e9).unwrap(), 1.40 * US) < 0.005);
        assert_eq!(service_time(1.0, 8.0).unwrap(), 1.0);
        assert!(rel(service_time(340.33, 10e9).unwrap(), 0.272264 * US) < 1e-5);
        assert!(service_time(0.0, 1.0).is_err());
        assert!(service_time(1.0, -1.0).is_err());
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(mm1_sojourn_cdf(0.0, p(1.0, 0.5)).unwrap(), 0.0);
        assert!((mm1_sojourn_cdf(14.65 * US, p(1.40 * US, 0.78)).unwrap() - 0.90).abs() < 0.005);
        let t = core::f64::consts::LN_2 * 2.0;
        assert!((mm1_sojourn_cdf(t, p(1.0, 0.5)).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(mm1_sojourn_cdf(-1e-9, p(1.0, 0.5)), Err(Error::Domain { .. })));
    }

    #[test]
    fn quantile_examples() {
        assert!(rel(mm1_quantile(0.99, p(1.40 * US, 0.78)).unwrap(), 29.31 * US) < 0.005);
        assert!(rel(mm1_quantile(0.90, p(1.40 * US, 0.78)).unwrap(), 14.65 * US) < 0.005);
        assert!(rel(mm1_quantile(0.90, p(1.4 * US, 0.583)).unwrap(), 7.71 * US) < 0.005);
        assert_eq!(mm1_quantile(0.0, p(1.0, 0.3)).unwrap(), 0.0);
        assert!(mm1_quantile(1.0, p(1.0, 0.3)).is_err());
        assert!(mm1_quantile(-0.1, p(1.0, 0.3)).is_err());
    }

    #[test]
    fn mean_sojourn_examples() {
        assert!(rel(mm1_mean_sojourn(p(1.40 * US, 0.78)), 6.36 * US) < 0.005);
        assert_eq!(mm1_mean_sojourn(p(1.0, 0.0)), 1.0);
        assert!(rel(mm1_mean_sojourn(p(1.4 * US, 0.583)), 3.35 * US) < 0.01);
    }

    #[test]
    fn pk_examples() {
        // 1.40 μs · 0.7/0.3 · 2.39/2 = 3.904 μs.
        assert!(rel(pk_mean_wait(1.40 * US, 0.7, 1.39).unwrap(), 3.90 * US) < 0.01);
        assert!(rel(pk_mean_sojourn(1.40 * US, 0.7, 1.39).unwrap(), 5.30 * US) < 0.01);
        assert_eq!(pk_mean_wait(2.0, 0.0, 1.5).unwrap(), 0.0);
        assert_eq!(pk_mean_sojourn(2.0, 0.0, 1.5).unwrap(), 2.0);
        let mm1_wait = 2.0 * 0.6 / 0.4;
        assert!(rel(pk_mean_wait(2.0, 0.6, 1.0).unwrap(), mm1_wait) < 1e-15);
        assert!(pk_mean_wait(1.0, 1.0, 1.0).is_err());
        assert!(pk_mean_wait(1.0, 0.5, -0.1).is_err());
    }

    #[test]
    fn inversion_on_decile_grid() {
        let params = p(1.4 * US, 0.78);
        for q in (0..10).map(|k| k as f64 / 10.0).chain([0.99]) {
            let t = mm1_quantile(q, params).unwrap();
            assert!((mm1_sojourn_cdf(t, params).unwrap() - q).abs() <= 1e-12, "q={q}");
        }
    }

    proptest! {
        #[test]
        fn inversion_holds(q in 0.0f64..0.999, rho in 0.0f64..0.99, ex in 1e-9f64..10.0) {
            let params = p(ex, rho);
            let t = mm1_quantile(q, params).unwrap();
            prop_assert!((mm1_sojourn_cdf(t, params).unwrap() - q).abs() <= 1e-12);
        }

        #[test]
        fn quantile_increases_in_q_and_rho(q in 0.01f64..0.98, rho in 0.0f64..0.98, ex in 1e-9f64..10.0) {
            let base = mm1_quantile(q, p(ex, rho)).unwrap();
            prop_assert!(mm1_quantile(q + 0.01, p(ex, rho)).unwrap() > base);
            prop_assert!(mm1_quantile(q, p(ex, rho + 0.01)).unwrap() > base);
        }

        #[test]
        fn pk_with_unit_scv_is_mm1(rho in 0.0f64..0.99, ex in 1e-9f64..10.0) {
            let pk = pk_mean_sojourn(ex, rho, 1.0).unwrap();
            let mm1 = mm1_mean_sojourn(p(ex, rho));
            prop_assert!((pk - mm1).abs() <= 1e-12 * mm1);
        }

        #[test]
        fn median_below_mean(rho in 0.0f64..0.99, ex in 1e-9f64..10.0) {
            let params = p(ex, rho);
            let median = mm1_quantile(0.5, params).unwrap();
            prop_assert!(median >= 0.0 && median < mm1_mean_sojourn(params));
        }
    }
}
