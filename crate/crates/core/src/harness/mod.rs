//! Experiment runner, real-vs-ideal distinguisher, statistics, lemma suites
//! and configuration files.
//!
//! Trials are independent: trial `t` draws the real world from stream `2t`
//! and the ideal world from stream `2t + 1` of the experiment seed, runs on
//! the rayon pool (feature `parallel`) and is collected back in trial order,
//! so the persisted JSONL is byte-identical for a given configuration.

pub mod config;
pub mod experiment;
pub mod lemmas;
pub mod stats;

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::engine::EngineError;
use crate::entropy::EntropyError;
use crate::hashpa::HashError;

pub use config::{parse_key_values, ExperimentConfig, Scenario, SCENARIO_NAMES};
pub use experiment::{run_experiment, run_experiment_to, DistinguishReport, ExperimentOutput};
pub use lemmas::{run_suite, LemmaSuite, SuiteReport, SUITE_NAMES};
pub use stats::{dkw_radius, histogram_tv, uniformity_test, union_radius, UniformityReport, DEFAULT_DELTA};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("unknown lemma suite {0:?}")]
    UnknownSuite(String),
    #[error("scenario {scenario}: {reason}")]
    ScenarioMismatch { scenario: String, reason: String },
    #[error("no samples")]
    EmptySamples,
    #[error("sample {index} has length {got}, expected {expected}")]
    SampleLength { index: usize, expected: usize, got: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// Invariant violations and infeasible parameters, as opposed to usage
    /// errors.
    pub fn is_violation(&self) -> bool {
        matches!(self, HarnessError::Engine(e) if e.is_violation())
    }
}

/// Runs `f` for every trial index and returns the results in trial order.
pub fn map_trials<T: Send>(trials: u64, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(f).collect()
    }
}

#[cfg(test)]
mod tests;
