//! Proof simulators for the BQS-OT protocol.
//!
//! Against a cheating sender the simulator measures the transmitted qubits in
//! the announced bases and feeds the extracted strings to ideal ROT; it never
//! touches anything the adversary keeps. Against a cheating receiver it plays
//! the honest sender, derives the choice bit `C = f(X0, X1, K)` from the
//! min-entropy splitting rule and sends `(C, S_C)` to ideal ROT, so the
//! other string becomes uniform.
//!
//! The receiver simulator needs the distribution the strategy induces on
//! `(X0, X1, K)`, so it is limited to declarative strategies whose knowledge
//! of `x` is classical and small enough to enumerate.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::Serialize;

use super::bqs_ot::{extract, prepare_sender_for, run_bqs_ot, PlayerProgram, ProtocolConfig, ReceiverOutput, SenderOutput, SenderView};
use super::functionality::{ideal_rot, Corruption, IdealInput};
use super::transcript::{Party, Transcript};
use super::{EngineError, DEFAULT_SUPPORT_BUDGET};
use crate::adversary::{AdversaryStrategy, BasisRule, Behavior, Role};
use crate::bits::{Basis, BasisString, BitString};
use crate::entropy::{smooth_min_entropy, split_choice, JointDistribution, SplitResult, K, X0, X1};
use crate::hashpa::HashSeed;
use crate::qstate::Qubit;

/// Largest qubit count for exact sender-side enumeration.
pub const MAX_EXACT_SENDER_QUBITS: usize = 12;
/// Largest `n` for the receiver simulator (`6^n` must fit the key type).
pub const MAX_RECEIVER_SIM_QUBITS: usize = 12;

#[derive(Clone, Debug)]
pub struct SenderSimulation {
    /// The adversary's own view: announced bases and seeds.
    pub adversary: SenderView,
    /// `(s0, s1)` extracted from the transmitted register and given to ROT.
    pub extracted: SenderOutput,
    /// The honest receiver's output from ideal ROT.
    pub receiver_c: u8,
    pub receiver_y: BitString,
}

fn sender_strategy(strategy: &AdversaryStrategy) -> Result<(), EngineError> {
    if strategy.role != Role::Sender {
        return Err(EngineError::InvalidInput(format!("{} is not a sender strategy", strategy.name)));
    }
    Ok(())
}

/// Runs the adversary, measures its register `M_Q` in the bases from `M_K`
/// and calls ideal ROT with the extracted strings.
pub fn simulate_sender<R: Rng + ?Sized>(
    strategy: &AdversaryStrategy,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<SenderSimulation, EngineError> {
    sender_strategy(strategy)?;
    cfg.validate()?;
    let (view, mut register) = prepare_sender_for(&PlayerProgram::Adversary(strategy.clone()), cfg, rng)?;
    if view.b.len() != cfg.n {
        return Err(EngineError::InvalidInput(format!("announced {} bases for {} qubits", view.b.len(), cfg.n)));
    }
    let x = register.measure(&view.b, rng)?;
    let extracted = SenderOutput { s0: extract(&x, &view.b, &view.r0, 0)?, s1: extract(&x, &view.b, &view.r1, 1)? };
    let rot = ideal_rot(
        cfg.ell,
        Party::A,
        Corruption::A,
        &IdealInput::Strings { x0: extracted.s0.clone(), x1: extracted.s1.clone() },
        rng,
    )?;
    Ok(SenderSimulation { adversary: view, extracted, receiver_c: rot.c, receiver_y: rot.y })
}

/// Exact distributions of the honest receiver's `(c, y)` against a
/// product-state sender, in the real protocol and in the simulation.
#[derive(Clone, Debug, Serialize)]
pub struct SenderExact {
    pub real: BTreeMap<String, f64>,
    pub ideal: BTreeMap<String, f64>,
    pub tv: f64,
}

fn product_outcomes(qubits: &[Qubit], bases: impl Fn(usize) -> Basis) -> Vec<(BitString, f64)> {
    let mut out = vec![(BitString::zeros(0), 1.0)];
    for (i, q) in qubits.iter().enumerate() {
        let basis = bases(i);
        let mut next = Vec::with_capacity(out.len() * 2);
        for (prefix, p) in &out {
            for v in 0..2u8 {
                let pv = p * q.probability(v, basis);
                if pv > 0.0 {
                    let mut s = prefix.clone();
                    s.push(v);
                    next.push((s, pv));
                }
            }
        }
        out = next;
    }
    out
}

pub fn distribution_tv(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Enumerates every measurement outcome of both worlds for fixed seeds.
pub fn sender_simulation_exact(
    strategy: &AdversaryStrategy,
    ell: usize,
    r0: &HashSeed,
    r1: &HashSeed,
) -> Result<SenderExact, EngineError> {
    sender_strategy(strategy)?;
    let (qubits, announce) = match &strategy.behavior {
        Behavior::ProductSender { qubits, announce } => (qubits, announce),
        other => return Err(EngineError::InvalidInput(format!("{other:?} is not a product-state sender"))),
    };
    let n = qubits.len();
    if n > MAX_EXACT_SENDER_QUBITS {
        return Err(EngineError::Budget { support: 1 << n, budget: 1 << MAX_EXACT_SENDER_QUBITS });
    }
    if r0.ell() != ell || r1.ell() != ell {
        return Err(EngineError::LengthMismatch { expected: ell, got: r0.ell() });
    }
    let seeds = [r0, r1];
    let mut real = BTreeMap::new();
    for c in 0..2u8 {
        for (o, p) in product_outcomes(qubits, |_| Basis::from_bit(c)) {
            let y = extract(&o, announce, seeds[c as usize], c)?;
            *real.entry(format!("{c}|{y}")).or_insert(0.0) += 0.5 * p;
        }
    }
    let mut ideal = BTreeMap::new();
    for (x, p) in product_outcomes(qubits, |i| announce.get(i)) {
        for c in 0..2u8 {
            let s = extract(&x, announce, seeds[c as usize], c)?;
            *ideal.entry(format!("{c}|{s}")).or_insert(0.0) += 0.5 * p;
        }
    }
    let tv = distribution_tv(&real, &ideal);
    Ok(SenderExact { real, ideal, tv })
}

/// How likely the receiver is to learn `x_i` with certainty, given `b_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum PositionLaw {
    Always,
    Half,
    IfBasis(u8),
}

impl PositionLaw {
    fn p_known(self, b: u8) -> f64 {
        match self {
            PositionLaw::Always => 1.0,
            PositionLaw::Half => 0.5,
            PositionLaw::IfBasis(c) => {
                if b == c {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Mixture over global choices of per-position laws.
fn knowledge_model(strategy: &AdversaryStrategy, n: usize) -> Result<Vec<(f64, Vec<PositionLaw>)>, EngineError> {
    if strategy.role != Role::Receiver {
        return Err(EngineError::InvalidInput(format!("{} is not a receiver strategy", strategy.name)));
    }
    Ok(match &strategy.behavior {
        Behavior::Measure(BasisRule::Uniform) => {
            (0..2).map(|c| (0.5, vec![PositionLaw::IfBasis(c); n])).collect()
        }
        Behavior::Measure(BasisRule::Fixed(c)) => vec![(1.0, vec![PositionLaw::IfBasis(*c); n])],
        Behavior::Measure(BasisRule::PerQubit) => vec![(1.0, vec![PositionLaw::Half; n])],
        Behavior::Store { m } => {
            vec![(1.0, (0..n).map(|i| if i < *m { PositionLaw::Always } else { PositionLaw::Half }).collect())]
        }
        Behavior::EprTeleport => vec![(1.0, vec![PositionLaw::Always; n])],
        other => return Err(EngineError::InvalidInput(format!("{other:?} has no enumerable receiver description"))),
    })
}

/// `K` packs, per position, the announced basis and what the receiver knows
/// about `x_i` (unknown, 0 or 1) in base 6.
fn encode_k(b: &BasisString, knowledge: &[Option<u8>]) -> u32 {
    let mut k = 0u32;
    for i in (0..b.len()).rev() {
        let state = knowledge[i].map_or(0, |v| 1 + v as u32);
        k = k * 6 + b.get(i).bit() as u32 * 3 + state;
    }
    k
}

fn substring_index(x: &BitString, b: &BasisString, i: u8) -> Result<u32, EngineError> {
    Ok(x.restrict(b, Basis::from_bit(i))?.padded(x.len()).to_u64() as u32)
}

/// The receiver simulator for one strategy and parameter set; building it
/// enumerates the induced distribution once.
#[derive(Clone, Debug)]
pub struct ReceiverSimulator {
    pub n: usize,
    /// `H^ε_min(X0 X1 | K)` of the induced distribution, `ε` from the config.
    pub alpha: f64,
    pub support: usize,
    /// `None` when `α = 0`: the adversary may know `x`, no choice bit exists
    /// and the simulator falls back to `C = 0`.
    pub split: Option<SplitResult>,
}

impl ReceiverSimulator {
    pub fn new(strategy: &AdversaryStrategy, cfg: &ProtocolConfig, budget: usize) -> Result<Self, EngineError> {
        let n = cfg.n;
        if n > MAX_RECEIVER_SIM_QUBITS {
            return Err(EngineError::Budget { support: usize::MAX, budget });
        }
        let model = knowledge_model(strategy, n)?;
        let estimate: usize = model
            .iter()
            .map(|(_, laws)| {
                let halves = laws.iter().filter(|l| **l == PositionLaw::Half).count();
                1usize << (2 * n + halves)
            })
            .sum();
        if estimate > budget {
            return Err(EngineError::Budget { support: estimate, budget });
        }
        let mut cells: HashMap<(u32, u32, u32), f64> = HashMap::new();
        let px = (-(2.0 * n as f64)).exp2();
        for (pg, laws) in &model {
            for bv in 0..1u64 << n {
                let b = BasisString::new(BitString::from_u64(bv, n))?;
                let halves: Vec<usize> = (0..n).filter(|&i| laws[i] == PositionLaw::Half).collect();
                for xv in 0..1u64 << n {
                    let x = BitString::from_u64(xv, n);
                    let x0 = substring_index(&x, &b, 0)?;
                    let x1 = substring_index(&x, &b, 1)?;
                    for mask in 0..1u64 << halves.len() {
                        let mut p = pg * px;
                        let mut knowledge = vec![None; n];
                        for i in 0..n {
                            let known = match laws[i] {
                                PositionLaw::Half => {
                                    let j = halves.iter().position(|&h| h == i).expect("listed");
                                    p *= 0.5;
                                    (mask >> j) & 1 == 1
                                }
                                law => law.p_known(b.get(i).bit()) > 0.0,
                            };
                            if known {
                                knowledge[i] = Some(x.get(i));
                            }
                        }
                        *cells.entry((x0, x1, encode_k(&b, &knowledge))).or_insert(0.0) += p;
                    }
                }
            }
        }
        let dim = 1u32 << n;
        let support = cells.len();
        let d = JointDistribution::new(
            vec![(X0.to_string(), dim), (X1.to_string(), dim), (K.to_string(), 6u32.pow(n as u32))],
            cells.into_iter().map(|((a, b, k), p)| (vec![a, b, k], p)),
        )?;
        let alpha = smooth_min_entropy(&d, &[X0, X1], &[K], cfg.eps)?;
        let split = if alpha > 1e-12 { Some(split_choice(&d, alpha, 0.0)?) } else { None };
        Ok(Self { n, alpha, support, split })
    }

    /// `C = f(X0, X1, K)`.
    pub fn choice(&self, x: &BitString, b: &BasisString, knowledge: &[Option<u8>]) -> Result<u8, EngineError> {
        let Some(split) = &self.split else { return Ok(0) };
        Ok(split.c(substring_index(x, b, 0)?, substring_index(x, b, 1)?, encode_k(b, knowledge)))
    }

    pub fn simulate<R: Rng + ?Sized>(
        &self,
        strategy: &AdversaryStrategy,
        cfg: &ProtocolConfig,
        rng: &mut R,
    ) -> Result<ReceiverSimulation, EngineError> {
        if cfg.n != self.n {
            return Err(EngineError::LengthMismatch { expected: self.n, got: cfg.n });
        }
        let run = run_bqs_ot(&PlayerProgram::Honest, &PlayerProgram::Adversary(strategy.clone()), cfg, rng)?;
        let view = &run.sender_view;
        let x = view.x.as_ref().expect("the simulator plays the honest sender");
        let c = self.choice(x, &view.b, &run.receiver.knowledge)?;
        let y = extract(x, &view.b, view.seed(c), c)?;
        let rot = ideal_rot(cfg.ell, Party::A, Corruption::B, &IdealInput::Choice { c, y: y.clone() }, rng)?;
        Ok(ReceiverSimulation {
            c,
            y,
            ideal_sender: SenderOutput { s0: rot.x0, s1: rot.x1 },
            internal_sender: run.sender_output.expect("honest sender"),
            adversary: run.receiver,
            transcript: run.transcript,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReceiverSimulation {
    pub c: u8,
    pub y: BitString,
    /// The honest sender's outputs in the ideal world: `s_C = Y`, the other
    /// one uniform.
    pub ideal_sender: SenderOutput,
    /// What the simulator's internal sender would have output.
    pub internal_sender: SenderOutput,
    /// The adversary's output, produced from its own run.
    pub adversary: ReceiverOutput,
    pub transcript: Transcript,
}

pub fn simulate_receiver<R: Rng + ?Sized>(
    strategy: &AdversaryStrategy,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<ReceiverSimulation, EngineError> {
    ReceiverSimulator::new(strategy, cfg, DEFAULT_SUPPORT_BUDGET)?.simulate(strategy, cfg, rng)
}
