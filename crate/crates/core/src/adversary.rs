//! Declarative cheating strategies.
//!
//! A strategy is data, not code: the engine interprets it, and the receiver
//! simulator can enumerate the distribution it induces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BasisString, BitString};
use crate::qstate::Qubit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("storing {m} qubits exceeds the simulator cap of {cap}")]
    MemoryCap { m: usize, cap: usize },
    #[error("strategy needs {needed} auxiliary qubits but the refined model allows β = {beta}")]
    AuxBound { needed: usize, beta: f64 },
    #[error("unknown strategy {0:?}")]
    Unknown(String),
    #[error("invalid strategy parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Sender,
    Receiver,
    Committer,
    Verifier,
}

/// Whether the environment's auxiliary quantum input is bounded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Only the adversary's own memory is bounded.
    Legacy,
    /// Auxiliary input is bounded by β qubits as well.
    #[default]
    Refined,
}

impl FromStr for Model {
    type Err = AdversaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "legacy" => Ok(Model::Legacy),
            "refined" => Ok(Model::Refined),
            _ => Err(AdversaryError::InvalidParameter(format!("model {s:?}"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Legacy => "legacy",
            Model::Refined => "refined",
        })
    }
}

/// Auxiliary input handed to the adversary by the environment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxSpec {
    pub qubits: usize,
    pub classical_bits: usize,
    /// The qubits are halves of pairs whose other halves the environment keeps.
    pub entangled: bool,
}

/// How a measuring receiver picks its bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisRule {
    /// One uniformly random `c` for every qubit, as the honest receiver does.
    Uniform,
    Fixed(u8),
    /// An independent random basis per qubit.
    PerQubit,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Behavior {
    /// The honest sender, run as an adversary.
    HonestSender,
    /// Sends the given single-qubit states and announces `announce`.
    ProductSender { qubits: Vec<Qubit>, announce: BasisString },
    /// Measures each qubit on arrival.
    Measure(BasisRule),
    /// Keeps the first `m` qubits, measures the rest in random bases and the
    /// kept ones once the bases are announced.
    Store { m: usize },
    /// Teleports every arriving qubit into the environment.
    EprTeleport,
    /// Returns the qubits of one instance as its own in a parallel instance.
    Reflection,
    /// Commits honestly, then tries to open the other bit.
    BindingCheat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryStrategy {
    pub name: String,
    pub role: Role,
    /// Qubits the strategy holds at any memory-bound point.
    pub memory_bound: usize,
    pub aux: AuxSpec,
    pub behavior: Behavior,
}

impl AdversaryStrategy {
    /// Checks the auxiliary input against the model.
    pub fn admissible(&self, model: Model, beta: f64) -> Result<(), AdversaryError> {
        if model == Model::Refined && self.aux.qubits as f64 > beta {
            return Err(AdversaryError::AuxBound { needed: self.aux.qubits, beta });
        }
        Ok(())
    }

    pub fn is_honest(&self) -> bool {
        matches!(self.behavior, Behavior::HonestSender | Behavior::Measure(BasisRule::Uniform))
    }
}

fn strategy(name: &str, role: Role, memory_bound: usize, aux: AuxSpec, behavior: Behavior) -> AdversaryStrategy {
    AdversaryStrategy { name: name.to_string(), role, memory_bound, aux, behavior }
}

pub fn honest_sender() -> AdversaryStrategy {
    strategy("honest-sender", Role::Sender, 0, AuxSpec::default(), Behavior::HonestSender)
}

/// Honest receiver behaviour wrapped as a strategy.
pub fn honest_receiver() -> AdversaryStrategy {
    strategy("honest-receiver", Role::Receiver, 0, AuxSpec::default(), Behavior::Measure(BasisRule::Uniform))
}

/// Sender transmitting fixed BB84 states `|x⟩_b` and announcing `b`.
pub fn fixed_sender(x: &BitString, b: &BasisString) -> Result<AdversaryStrategy, AdversaryError> {
    if x.len() != b.len() {
        return Err(AdversaryError::InvalidParameter(format!("|x| = {} but |b| = {}", x.len(), b.len())));
    }
    let qubits = x.iter().zip(b.iter()).map(|(bit, basis)| Qubit::bb84(bit, basis)).collect();
    Ok(strategy("fixed-sender", Role::Sender, 0, AuxSpec::default(), Behavior::ProductSender { qubits, announce: b.clone() }))
}

/// Sender transmitting arbitrary single-qubit states.
pub fn product_sender(qubits: Vec<Qubit>, announce: BasisString) -> Result<AdversaryStrategy, AdversaryError> {
    if qubits.len() != announce.len() {
        return Err(AdversaryError::InvalidParameter(format!(
            "{} qubits but {} announced bases",
            qubits.len(),
            announce.len()
        )));
    }
    Ok(strategy("product-sender", Role::Sender, 0, AuxSpec::default(), Behavior::ProductSender { qubits, announce }))
}

pub fn full_measurement_receiver(rule: BasisRule) -> Result<AdversaryStrategy, AdversaryError> {
    if let BasisRule::Fixed(c) = rule {
        if c > 1 {
            return Err(AdversaryError::InvalidParameter(format!("basis {c}")));
        }
    }
    Ok(strategy("full-measurement", Role::Receiver, 0, AuxSpec::default(), Behavior::Measure(rule)))
}

pub fn storing_receiver(m: usize, max_qubits: usize) -> Result<AdversaryStrategy, AdversaryError> {
    if m > max_qubits {
        return Err(AdversaryError::MemoryCap { m, cap: max_qubits });
    }
    Ok(strategy("storing", Role::Receiver, m, AuxSpec::default(), Behavior::Store { m }))
}

/// The environment hands over `n` EPR halves; the adversary teleports each
/// arriving qubit and keeps only the `2n` Bell-measurement bits. Refused
/// whenever the auxiliary input is bounded below `n` qubits.
pub fn epr_teleport_receiver(n: usize, model: Model, beta: f64) -> Result<AdversaryStrategy, AdversaryError> {
    let s = strategy(
        "epr-teleport",
        Role::Receiver,
        0,
        AuxSpec { qubits: n, classical_bits: 0, entangled: true },
        Behavior::EprTeleport,
    );
    s.admissible(model, beta)?;
    Ok(s)
}

pub fn reflection_attacker() -> AdversaryStrategy {
    strategy("reflection", Role::Receiver, 0, AuxSpec::default(), Behavior::Reflection)
}

pub fn binding_attacker() -> AdversaryStrategy {
    strategy("binding", Role::Committer, 0, AuxSpec::default(), Behavior::BindingCheat)
}

/// Options for [`named`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyOptions {
    pub n: usize,
    pub m: usize,
    pub model: Model,
    pub beta: f64,
    pub max_qubits: usize,
    pub c: Option<u8>,
}

pub const STRATEGY_NAMES: [&str; 6] = ["full-measurement", "fixed-basis", "storing", "epr-teleport", "reflection", "binding"];

/// Looks a strategy up by its CLI name.
pub fn named(name: &str, opts: &StrategyOptions) -> Result<AdversaryStrategy, AdversaryError> {
    match name {
        "full-measurement" => full_measurement_receiver(BasisRule::PerQubit),
        "fixed-basis" => full_measurement_receiver(BasisRule::Fixed(opts.c.unwrap_or(0))),
        "storing" => storing_receiver(opts.m, opts.max_qubits),
        "epr-teleport" => epr_teleport_receiver(opts.n, opts.model, opts.beta),
        "reflection" => Ok(reflection_attacker()),
        "binding" => Ok(binding_attacker()),
        _ => Err(AdversaryError::Unknown(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epr_teleport_is_refused_when_aux_is_bounded() {
        assert!(epr_teleport_receiver(8, Model::Legacy, 0.0).is_ok());
        assert_eq!(
            epr_teleport_receiver(8, Model::Refined, 0.0),
            Err(AdversaryError::AuxBound { needed: 8, beta: 0.0 })
        );
        assert!(epr_teleport_receiver(8, Model::Refined, 8.0).is_ok());
    }

    #[test]
    fn storing_respects_cap() {
        assert_eq!(storing_receiver(15, 14), Err(AdversaryError::MemoryCap { m: 15, cap: 14 }));
        assert_eq!(storing_receiver(4, 14).unwrap().memory_bound, 4);
    }

    #[test]
    fn names_resolve() {
        let opts = StrategyOptions { n: 8, m: 2, model: Model::Legacy, beta: 0.0, max_qubits: 14, c: Some(1) };
        for name in STRATEGY_NAMES {
            assert!(named(name, &opts).is_ok(), "{name}");
        }
        assert_eq!(named("fixed-basis", &opts).unwrap().behavior, Behavior::Measure(BasisRule::Fixed(1)));
        assert!(matches!(named("breidbart", &opts), Err(AdversaryError::Unknown(_))));
    }
}
