//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::HarnessError;
use crate::adversary::Model;
use crate::bounds::SecurityParams;
use crate::engine::ProtocolConfig;
use crate::qstate::DEFAULT_MAX_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Honest BQS-OT against ideal ROT.
    HonestRot,
    /// Product-state sender against the sender simulator.
    SenderCorrupt,
    /// Receiver measuring every qubit in a random basis against the
    /// receiver simulator.
    ReceiverMeasure,
    /// Receiver storing `m` qubits against the receiver simulator.
    Storing,
    /// Receiver teleporting everything to its environment.
    EprTeleport,
    /// Two role-swapped executions: the attack against the honest control.
    Reflection,
}

pub const SCENARIO_NAMES: [&str; 6] =
    ["honest-rot", "sender-corrupt", "receiver-measure", "storing", "epr-teleport", "reflection"];

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::HonestRot,
        Scenario::SenderCorrupt,
        Scenario::ReceiverMeasure,
        Scenario::Storing,
        Scenario::EprTeleport,
        Scenario::Reflection,
    ];

    pub fn name(self) -> &'static str {
        SCENARIO_NAMES[Scenario::ALL.iter().position(|&s| s == self).expect("listed")]
    }
}

impl FromStr for Scenario {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SCENARIO_NAMES
            .iter()
            .position(|&n| n == s)
            .map(|i| Scenario::ALL[i])
            .ok_or_else(|| HarnessError::UnknownScenario(s.to_string()))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: SecurityParams,
    pub trials: u64,
    pub seed: u64,
    pub model: Model,
    /// JSONL artifact path.
    pub out: Option<PathBuf>,
    pub every_round: bool,
    pub strict_bounds: bool,
    pub max_qubits: usize,
    /// Failure probability of the confidence radius.
    pub delta: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::HonestRot,
            params: SecurityParams::new(32, 2, 1e-3),
            trials: 1000,
            seed: 0,
            model: Model::Refined,
            out: None,
            every_round: false,
            strict_bounds: false,
            max_qubits: DEFAULT_MAX_QUBITS,
            delta: super::DEFAULT_DELTA,
        }
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value.parse().map_err(|_| HarnessError::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, HarnessError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(HarnessError::Config(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

impl ExperimentConfig {
    pub const KEYS: [&'static str; 14] = [
        "scenario",
        "n",
        "ell",
        "m",
        "beta",
        "eps",
        "trials",
        "seed",
        "model",
        "out",
        "every_round",
        "strict_bounds",
        "max_qubits",
        "delta",
    ];

    /// Applies `key = value` pairs on top of `self`.
    pub fn apply(&mut self, pairs: &BTreeMap<String, String>) -> Result<(), HarnessError> {
        for (k, v) in pairs {
            match k.as_str() {
                "scenario" => self.scenario = v.parse()?,
                "n" => self.params.n = parse(k, v)?,
                "ell" => self.params.ell = parse(k, v)?,
                "m" => self.params.m = parse(k, v)?,
                "beta" => self.params.beta = parse(k, v)?,
                "eps" => self.params.eps = parse(k, v)?,
                "trials" => self.trials = parse(k, v)?,
                "seed" => self.seed = parse(k, v)?,
                "model" => {
                    self.model = v.parse().map_err(|_| HarnessError::Config(format!("model: unknown {v:?}")))?
                }
                "out" => self.out = (!v.is_empty()).then(|| PathBuf::from(v)),
                "every_round" => self.every_round = parse_bool(k, v)?,
                "strict_bounds" => self.strict_bounds = parse_bool(k, v)?,
                "max_qubits" => self.max_qubits = parse(k, v)?,
                "delta" => self.delta = parse(k, v)?,
                _ => return Err(HarnessError::Config(format!("unknown key {k:?}"))),
            }
        }
        Ok(())
    }

    pub fn from_key_values(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        cfg.apply(&parse_key_values(text)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        Self::from_key_values(&std::fs::read_to_string(path)?)
    }

    /// The resolved configuration as `key = value` pairs.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        let p = &self.params;
        [
            ("scenario", self.scenario.to_string()),
            ("n", p.n.to_string()),
            ("ell", p.ell.to_string()),
            ("m", p.m.to_string()),
            ("beta", p.beta.to_string()),
            ("eps", p.eps.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("model", self.model.to_string()),
            ("out", self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default()),
            ("every_round", self.every_round.to_string()),
            ("strict_bounds", self.strict_bounds.to_string()),
            ("max_qubits", self.max_qubits.to_string()),
            ("delta", self.delta.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    pub fn to_key_values(&self) -> String {
        self.resolved().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(HarnessError::Config(format!("delta = {} outside (0, 1)", self.delta)));
        }
        self.params.validate()?;
        Ok(())
    }

    pub fn protocol(&self) -> ProtocolConfig {
        let mut cfg = ProtocolConfig::from_params(&self.params, self.model);
        cfg.enforce_every_round = self.every_round;
        cfg.strict_bounds = self.strict_bounds;
        cfg.max_qubits = self.max_qubits;
        cfg
    }
}
