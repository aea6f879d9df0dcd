//! Queueing envelopes for packet networks.
//!
//! An M/G/1 queue fed with a realistic packet-size mix has no closed-form
//! delay distribution. This crate simulates such queues, searches for the
//! lightest-loaded M/M/1 queue (same mean service time) whose sojourn-time
//! quantiles sit above the simulated ones on every percentile from 50% to
//! 99%, fits quadratic maps from real load to envelope load, and turns those
//! maps into closed-form delay percentiles for capacity dimensioning.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, reports and
//! the command-line tool live in `detnet-envelope-cli`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dimension;
pub mod distributions;
pub mod envelope;
mod error;
pub mod queueing;
pub mod regress;
pub mod rng;
pub mod sim;

pub use dimension::{AggregatePeak, AggregationScenario, DimensionReport, aggregate_peak, dimension_delay};
pub use distributions::PacketSizeDistribution;
pub use envelope::{
    DominanceCheck, EnvelopeGrid, EnvelopeResult, envelope_quantiles, find_envelope_load, find_envelope_load_with,
    verify_dominance,
};
pub use error::{Error, Result};
pub use queueing::{
    Mm1Params, mm1_mean_sojourn, mm1_quantile, mm1_sojourn_cdf, pk_mean_sojourn, pk_mean_wait, service_time,
};
pub use regress::{QuadraticModel, SweepPoint, SweepPolicy, fit_quadratic, predict, sweep_envelope};
pub use sim::{DelaySample, SimConfig, arrival_rate, empirical_quantiles, simulate_mg1};
