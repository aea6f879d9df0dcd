//! JSON documents emitted by the tool.

use std::collections::BTreeMap;

use detnet_envelope::envelope::EnvelopeResult;
use detnet_envelope::{DimensionReport, QuadraticModel};
use serde::{Deserialize, Serialize};

use crate::manifest::RunManifest;

/// Map key for a probability: shortest decimal that round-trips.
pub fn prob_key(p: f64) -> String {
    format!("{p}")
}

fn keyed(pairs: impl IntoIterator<Item = (f64, f64)>) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(p, v)| (prob_key(p), v)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub mean: f64,
    pub quantiles: BTreeMap<String, f64>,
    pub n_samples: usize,
    pub mean_service: f64,
    pub load: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest: Option<RunManifest>,
}

impl SimulationSummary {
    pub fn new(mean: f64, probs: &[f64], quantiles: &[f64], n_samples: usize, mean_service: f64, load: f64) -> Self {
        Self {
            mean,
            quantiles: keyed(probs.iter().copied().zip(quantiles.iter().copied())),
            n_samples,
            mean_service,
            load,
            manifest: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRecord {
    pub rho_env: f64,
    pub mean_env_seconds: f64,
    pub mean_service_seconds: f64,
    /// Envelope quantile per grid percentile.
    pub grid: BTreeMap<String, f64>,
    /// Envelope minus sample quantile per grid percentile.
    pub margins: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest: Option<RunManifest>,
}

impl From<&EnvelopeResult> for EnvelopeRecord {
    fn from(r: &EnvelopeResult) -> Self {
        let env = r.grid_quantiles();
        let p = r.percentile_grid.iter().copied();
        Self {
            rho_env: r.rho_env,
            mean_env_seconds: r.mean_env,
            mean_service_seconds: r.mean_service,
            grid: keyed(p.clone().zip(env.iter().copied())),
            margins: keyed(p.zip(env.iter().zip(&r.real_quantiles).map(|(e, q)| e - q))),
            manifest: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub label: String,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub rms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest: Option<RunManifest>,
}

impl From<&QuadraticModel> for ModelRecord {
    fn from(m: &QuadraticModel) -> Self {
        Self { label: m.label.clone(), c0: m.c0, c1: m.c1, c2: m.c2, rms: m.rms, manifest: None }
    }
}

impl From<&ModelRecord> for QuadraticModel {
    fn from(r: &ModelRecord) -> Self {
        let mut m = QuadraticModel::new(r.label.clone(), r.c0, r.c1, r.c2);
        m.rms = r.rms;
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionRecord {
    pub aggregate_mean_bps: f64,
    pub aggregate_sd_bps: f64,
    pub peak_bps: f64,
    pub rho_real: f64,
    pub rho_env: f64,
    pub mean_service_s: f64,
    pub mean_delay_s: f64,
    pub percentiles: BTreeMap<String, f64>,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest: Option<RunManifest>,
}

impl DimensionRecord {
    pub fn new(r: &DimensionReport, model: &str) -> Self {
        Self {
            aggregate_mean_bps: r.aggregate_mean_bps,
            aggregate_sd_bps: r.aggregate_sd_bps,
            peak_bps: r.peak_bps,
            rho_real: r.rho_real,
            rho_env: r.rho_env,
            mean_service_s: r.mean_service_s,
            mean_delay_s: r.mean_delay_s,
            percentiles: keyed(r.percentiles.iter().copied()),
            model: model.to_string(),
            manifest: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRecord {
    pub mean_service_seconds: f64,
    pub load: f64,
    pub mm1_mean_seconds: f64,
    pub mm1_quantiles: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pk_mean_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest: Option<RunManifest>,
}

impl AnalyzeRecord {
    pub fn new(mean_service: f64, load: f64, mean: f64, quantiles: &[(f64, f64)], pk_mean: Option<f64>) -> Self {
        Self {
            mean_service_seconds: mean_service,
            load,
            mm1_mean_seconds: mean,
            mm1_quantiles: keyed(quantiles.iter().copied()),
            pk_mean_seconds: pk_mean,
            manifest: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_keys_sort_numerically() {
        let grid: Vec<f64> = (100..=198).map(|k| k as f64 / 200.0).collect();
        let map = keyed(grid.iter().map(|&p| (p, p)));
        let values: Vec<f64> = map.values().copied().collect();
        assert_eq!(values, grid);
        assert_eq!(prob_key(0.57), "0.57");
        assert_eq!(prob_key(0.9), "0.9");
    }

    #[test]
    fn model_record_round_trip() {
        let record = ModelRecord::from(&QuadraticModel::paper_sfmix());
        let json = serde_json::to_string(&record).unwrap();
        assert_eq!(json, r#"{"label":"paper-sfmix","c0":0.5,"c1":0.16,"c2":0.34,"rms":null}"#);
        let back: ModelRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(QuadraticModel::from(&back), QuadraticModel::paper_sfmix());
    }
}
