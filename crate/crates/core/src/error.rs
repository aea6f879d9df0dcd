use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid packet-size distribution: {0}")]
    InvalidDistribution(String),

    #[error("infeasible moments: {0}")]
    InfeasibleMoments(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{name} = {value} is outside {bounds}")]
    Domain { name: &'static str, value: f64, bounds: &'static str },

    #[error("empty delay sample")]
    EmptySample,

    #[error("no envelope load up to {max_candidate} dominates the sample")]
    NoEnvelopeFound { max_candidate: f64 },

    #[error("degenerate design: {distinct} distinct abscissae, at least 3 required")]
    DegenerateDesign { distinct: usize },

    #[error("unstable scenario: peak {peak_bps} b/s is not below capacity {capacity_bps} b/s")]
    Unstable { peak_bps: f64, capacity_bps: f64 },

    #[error("sweep point at load {load}: {source}")]
    Sweep { load: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, bounds: &'static str) -> Self {
        Error::Domain { name, value, bounds }
    }

    /// True for errors caused by bad inputs rather than by what a computation
    /// found.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::NoEnvelopeFound { .. } => false,
            Error::Sweep { source, .. } => source.is_validation(),
            _ => true,
        }
    }
}
