//! The BB84-based randomized OT protocol in the bounded-quantum-storage
//! model.
//!
//! Sender: (1) pick `x ∈ {0,1}^n`, `b ∈ {+,×}^n`; (2) send `|x⟩_b`;
//! (3) send `(b, r0, r1)`; (5) output `s_i = h(r_i, x_{|i})`. The listing has
//! no step 4; the four listed steps run in order.
//!
//! Receiver: pick `c`, measure every qubit in basis `c` on arrival, and
//! after `(b, r0, r1)` output `(c, h(r_c, x'_{|c}))`.
//!
//! Memory bounds are checked before the receiver's first step (auxiliary
//! input, refined model only) and before the sender's step 3 (quantum
//! memory `m`), and optionally after every round.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::transcript::{Party, Transcript};
use super::EngineError;
use crate::adversary::{AdversaryStrategy, BasisRule, Behavior, Model, Role};
use crate::bits::{Basis, BasisString, BitString};
use crate::bounds::{self, Variant};
use crate::hashpa::{sample_hash_seed, HashSeed};
use crate::qstate::{
    encode_bb84_product, gates, teleport_correction, teleport_uncorrected, ProductState, QuantumState, Qubit,
    DEFAULT_MAX_QUBITS,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n: usize,
    pub ell: usize,
    pub model: Model,
    /// Receiver quantum memory bound.
    pub m: usize,
    /// Auxiliary-input bound in qubits (refined model).
    pub beta: f64,
    pub eps: f64,
    /// Also check the memory bound after every round.
    pub enforce_every_round: bool,
    /// Cap on jointly simulated registers.
    pub max_qubits: usize,
    /// Refuse to run when `ℓ` exceeds the proven secure length.
    pub strict_bounds: bool,
}

impl ProtocolConfig {
    pub fn new(n: usize, ell: usize) -> Self {
        Self {
            n,
            ell,
            model: Model::Refined,
            m: 0,
            beta: 0.0,
            eps: 1e-3,
            enforce_every_round: false,
            max_qubits: DEFAULT_MAX_QUBITS,
            strict_bounds: false,
        }
    }

    pub fn from_params(p: &bounds::SecurityParams, model: Model) -> Self {
        Self { m: p.m as usize, beta: p.beta, eps: p.eps, model, ..Self::new(p.n as usize, p.ell as usize) }
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn with_memory(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn variant(&self) -> Variant {
        if self.beta > 0.0 {
            Variant::MixedAux
        } else {
            Variant::Main
        }
    }

    /// Largest proven-secure `ℓ` for these parameters.
    pub fn max_ell(&self) -> Result<u64, EngineError> {
        Ok(bounds::max_ell(self.n as u64, self.m as u64, self.beta, self.eps, self.variant())?)
    }

    pub fn within_bound(&self) -> Result<bool, EngineError> {
        Ok(self.ell as u64 <= self.max_ell()?)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.n == 0 || self.ell == 0 || self.ell > self.n {
            return Err(EngineError::InvalidInput(format!("need 1 ≤ ℓ ≤ n, got n = {}, ℓ = {}", self.n, self.ell)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(EngineError::InvalidInput(format!("ε = {} outside (0, 1)", self.eps)));
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(EngineError::InvalidInput(format!("β = {} is negative", self.beta)));
        }
        if self.strict_bounds {
            let max_ell = self.max_ell()?;
            if self.ell as u64 > max_ell {
                return Err(EngineError::Infeasible { ell: self.ell, max_ell });
            }
        }
        Ok(())
    }
}

/// A player's program: the honest one or a declared strategy.
#[derive(Clone, Debug, PartialEq)]
pub enum PlayerProgram {
    Honest,
    Adversary(AdversaryStrategy),
}

impl PlayerProgram {
    pub fn memory_bound(&self) -> usize {
        match self {
            PlayerProgram::Honest => 0,
            PlayerProgram::Adversary(s) => s.memory_bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SenderView {
    /// Known only to a sender that prepared BB84 states itself.
    pub x: Option<BitString>,
    pub b: BasisString,
    pub r0: HashSeed,
    pub r1: HashSeed,
}

impl SenderView {
    pub fn seed(&self, i: u8) -> &HashSeed {
        if i == 0 {
            &self.r0
        } else {
            &self.r1
        }
    }

    /// `b ‖ r0 ‖ r1`, the step-3 message.
    pub fn message(&self) -> BitString {
        self.b.as_bits().concat(&self.r0.to_bits()).concat(&self.r1.to_bits())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SenderOutput {
    pub s0: BitString,
    pub s1: BitString,
}

impl SenderOutput {
    pub fn s(&self, i: u8) -> &BitString {
        if i == 0 {
            &self.s0
        } else {
            &self.s1
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReceiverOutput {
    /// `(c, y)` for receivers that follow the protocol's output rule.
    pub c: Option<u8>,
    pub y: Option<BitString>,
    /// A cheating receiver's guesses for `(s0, s1)`.
    pub guesses: Option<[BitString; 2]>,
    /// Bits of `x` the receiver knows with certainty once `b` is public.
    pub knowledge: Vec<Option<u8>>,
    /// Classical memory at the end of the run.
    pub k_out: BitString,
    /// Classical bits held at the step-3 memory-bound point.
    pub classical_bits_at_bound: usize,
    /// Most qubits held at any memory-bound point.
    pub max_qubits_held: usize,
    /// Qubits kept by the environment on the adversary's behalf.
    pub environment_qubits: usize,
}

#[derive(Clone, Debug)]
pub struct BqsOtRun {
    pub sender_view: SenderView,
    /// Present when the sender is honest.
    pub sender_output: Option<SenderOutput>,
    pub receiver: ReceiverOutput,
    pub transcript: Transcript,
    pub within_bound: bool,
}

/// `h(r, x_{|i})` with the substring zero-padded to `n` bits.
pub fn extract(x: &BitString, b: &BasisString, r: &HashSeed, i: u8) -> Result<BitString, EngineError> {
    let sub = x.restrict(b, Basis::from_bit(i))?.padded(x.len());
    Ok(r.hash(&sub)?)
}

struct PreparedSender {
    view: SenderView,
    qubits: ProductState,
}

fn prepare_sender<R: Rng + ?Sized>(
    program: &PlayerProgram,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<PreparedSender, EngineError> {
    let behavior = match program {
        PlayerProgram::Honest => &Behavior::HonestSender,
        PlayerProgram::Adversary(s) => {
            if s.role != Role::Sender {
                return Err(EngineError::InvalidInput(format!("{} is not a sender strategy", s.name)));
            }
            &s.behavior
        }
    };
    let (x, b, qubits) = match behavior {
        Behavior::HonestSender => {
            let x = BitString::random(cfg.n, rng);
            let b = BasisString::random(cfg.n, rng);
            let qubits = encode_bb84_product(&x, &b)?;
            (Some(x), b, qubits)
        }
        Behavior::ProductSender { qubits, announce } => {
            if qubits.len() != cfg.n {
                return Err(EngineError::LengthMismatch { expected: cfg.n, got: qubits.len() });
            }
            (None, announce.clone(), ProductState::new(qubits.clone()))
        }
        other => return Err(EngineError::InvalidInput(format!("{other:?} cannot act as sender"))),
    };
    let r0 = sample_hash_seed(cfg.n, cfg.ell, rng)?;
    let r1 = sample_hash_seed(cfg.n, cfg.ell, rng)?;
    Ok(PreparedSender { view: SenderView { x, b, r0, r1 }, qubits })
}

/// The sender's first two steps: its view and the register it transmits.
pub(crate) fn prepare_sender_for<R: Rng + ?Sized>(
    program: &PlayerProgram,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<(SenderView, ProductState), EngineError> {
    let p = prepare_sender(program, cfg, rng)?;
    Ok((p.view, p.qubits))
}

/// Receiver state between arrival of the qubits and the step-3 message.
enum Holding {
    /// Measured in `bases`; the outcome bits.
    Measured { bases: BasisString, outcomes: BitString, rule_c: Option<u8> },
    /// The first `stored.len()` qubits are still quantum.
    Stored { stored: Vec<Qubit>, bases: Vec<Basis>, outcomes: Vec<u8> },
    /// Teleported out; Bell bits and the environment's halves.
    Teleported { bits: Vec<[u8; 2]>, remote: Vec<QuantumState> },
}

impl Holding {
    fn qubits_held(&self) -> usize {
        match self {
            Holding::Stored { stored, .. } => stored.len(),
            _ => 0,
        }
    }

    fn classical_bits(&self) -> usize {
        match self {
            Holding::Measured { outcomes, .. } => 2 * outcomes.len(),
            Holding::Stored { outcomes, .. } => 2 * outcomes.len(),
            Holding::Teleported { bits, .. } => 2 * bits.len(),
        }
    }
}

fn receiver_strategy(program: &PlayerProgram) -> Result<Option<&AdversaryStrategy>, EngineError> {
    match program {
        PlayerProgram::Honest => Ok(None),
        PlayerProgram::Adversary(s) if s.role == Role::Receiver => Ok(Some(s)),
        PlayerProgram::Adversary(s) => Err(EngineError::InvalidInput(format!("{} is not a receiver strategy", s.name))),
    }
}

fn receive<R: Rng + ?Sized>(
    program: &PlayerProgram,
    mut qubits: ProductState,
    rng: &mut R,
) -> Result<Holding, EngineError> {
    let n = qubits.len();
    let rule = match receiver_strategy(program)? {
        None => BasisRule::Uniform,
        Some(s) => match &s.behavior {
            Behavior::Measure(rule) => *rule,
            Behavior::Store { m } => {
                let keep = (*m).min(n);
                let all = qubits.into_qubits();
                let stored = all[..keep].to_vec();
                let mut bases = Vec::with_capacity(n - keep);
                let mut outcomes = Vec::with_capacity(n - keep);
                for mut q in all.into_iter().skip(keep) {
                    let basis = Basis::from_bit(rng.gen_range(0..2));
                    outcomes.push(q.measure(basis, rng));
                    bases.push(basis);
                }
                return Ok(Holding::Stored { stored, bases, outcomes });
            }
            Behavior::EprTeleport => {
                let mut bits = Vec::with_capacity(n);
                let mut remote = Vec::with_capacity(n);
                for q in qubits.qubits() {
                    let epr = gates::epr_pair("half", "env")?;
                    let t = teleport_uncorrected(&q.to_state("in"), "in", &epr, rng)?;
                    bits.push(t.bits);
                    remote.push(t.remote);
                }
                return Ok(Holding::Teleported { bits, remote });
            }
            other => return Err(EngineError::InvalidInput(format!("{other:?} cannot act as a single-instance receiver"))),
        },
    };
    let (bases, rule_c) = match rule {
        BasisRule::Uniform => {
            let c = rng.gen_range(0..2u8);
            (BasisString::uniform(n, Basis::from_bit(c)), Some(c))
        }
        BasisRule::Fixed(c) => (BasisString::uniform(n, Basis::from_bit(c)), Some(c)),
        BasisRule::PerQubit => (BasisString::random(n, rng), None),
    };
    let outcomes = qubits.measure(&bases, rng)?;
    Ok(Holding::Measured { bases, outcomes, rule_c })
}

fn finish_receiver<R: Rng + ?Sized>(
    holding: Holding,
    view: &SenderView,
    rng: &mut R,
) -> Result<ReceiverOutput, EngineError> {
    let n = view.b.len();
    let mut out = ReceiverOutput::default();
    let (estimate, record, knowledge) = match holding {
        Holding::Measured { bases, outcomes, rule_c } => {
            let knowledge: Vec<Option<u8>> =
                (0..n).map(|i| (bases.get(i) == view.b.get(i)).then(|| outcomes.get(i))).collect();
            if let Some(c) = rule_c {
                out.c = Some(c);
                out.y = Some(extract(&outcomes, &view.b, view.seed(c), c)?);
            }
            let record = bases.as_bits().concat(&outcomes);
            (outcomes, record, knowledge)
        }
        Holding::Stored { stored, bases, outcomes } => {
            let keep = stored.len();
            let mut estimate = BitString::zeros(n);
            let mut knowledge = vec![None; n];
            for (i, mut q) in stored.into_iter().enumerate() {
                let v = q.measure(view.b.get(i), rng);
                estimate.set(i, v);
                knowledge[i] = Some(v);
            }
            for (j, (&basis, &v)) in bases.iter().zip(&outcomes).enumerate() {
                let i = keep + j;
                estimate.set(i, v);
                if basis == view.b.get(i) {
                    knowledge[i] = Some(v);
                }
            }
            let basis_bits = BitString::new(bases.iter().map(|b| b.bit()).collect())?;
            let record = basis_bits.concat(&BitString::new(outcomes)?);
            (estimate, record, knowledge)
        }
        Holding::Teleported { bits, remote } => {
            let mut estimate = BitString::zeros(n);
            let mut record = BitString::zeros(0);
            for (i, (b2, env)) in bits.iter().zip(remote).enumerate() {
                record.push(b2[0]);
                record.push(b2[1]);
                let corrected = teleport_correction(&env, "env", *b2)?;
                let (v, _) = corrected.measure(&["env"], &BasisString::uniform(1, view.b.get(i)), rng)?;
                estimate.set(i, v.get(0));
            }
            let knowledge = estimate.iter().map(Some).collect();
            (estimate, record, knowledge)
        }
    };
    if out.c.is_none() {
        out.guesses = Some([extract(&estimate, &view.b, &view.r0, 0)?, extract(&estimate, &view.b, &view.r1, 1)?]);
    }
    out.knowledge = knowledge;
    out.k_out = record.concat(&view.message());
    Ok(out)
}

struct BoundCheck<'a> {
    cfg: &'a ProtocolConfig,
    declared: usize,
    receiver: Party,
}

impl BoundCheck<'_> {
    fn check(&self, t: &mut Transcript, point: &str, held: usize, out: &mut ReceiverOutput) -> Result<(), EngineError> {
        let bound = self.cfg.m.min(self.declared);
        out.max_qubits_held = out.max_qubits_held.max(held);
        t.local(
            self.receiver,
            &BitString::zeros(0),
            format!("memory-bound point={point} held={held} bound={bound}"),
        );
        if held > self.cfg.m || held > self.declared {
            t.local(self.receiver, &BitString::zeros(0), format!("memory-bound-violation point={point}"));
            return Err(EngineError::MemoryBoundViolation { point: point.to_string(), held, bound });
        }
        Ok(())
    }
}

fn run_roles<R: Rng + ?Sized>(
    sender: &PlayerProgram,
    receiver: &PlayerProgram,
    cfg: &ProtocolConfig,
    sender_party: Party,
    rng: &mut R,
) -> Result<BqsOtRun, EngineError> {
    cfg.validate()?;
    let receiver_party = sender_party.other();
    let strategy = receiver_strategy(receiver)?;
    let aux = strategy.map_or(0, |s| s.aux.qubits);
    if let Some(s) = strategy {
        s.admissible(cfg.model, cfg.beta)?;
        if s.memory_bound > cfg.max_qubits {
            return Err(EngineError::InvalidInput(format!(
                "declared memory {} exceeds the simulator cap {}",
                s.memory_bound, cfg.max_qubits
            )));
        }
    }
    let bounds = BoundCheck { cfg, declared: receiver.memory_bound(), receiver: receiver_party };
    let mut t = Transcript::new();
    let mut out_stub = ReceiverOutput::default();

    t.tick();
    let aux_bound = match cfg.model {
        Model::Refined => format!("{}", cfg.beta),
        Model::Legacy => "unbounded".to_string(),
    };
    t.local(receiver_party, &BitString::zeros(0), format!("memory-bound point=before-step-1 aux={aux} bound={aux_bound}"));

    let prepared = prepare_sender(sender, cfg, rng)?;
    t.send_qubits(sender_party, cfg.n, "bb84");
    let holding = receive(receiver, prepared.qubits, rng)?;
    if cfg.enforce_every_round {
        bounds.check(&mut t, "after-round-1", holding.qubits_held(), &mut out_stub)?;
    }

    t.tick();
    bounds.check(&mut t, "before-step-3", holding.qubits_held(), &mut out_stub)?;
    let classical_at_bound = holding.classical_bits();

    t.tick();
    let view = prepared.view;
    t.send_bits(sender_party, &view.message(), "bases-and-seeds");
    let mut receiver_out = finish_receiver(holding, &view, rng)?;
    receiver_out.max_qubits_held = out_stub.max_qubits_held;
    receiver_out.classical_bits_at_bound = classical_at_bound;
    receiver_out.environment_qubits = if aux > 0 && strategy.is_some_and(|s| s.aux.entangled) { aux } else { 0 };
    if cfg.enforce_every_round {
        bounds.check(&mut t, "after-round-3", 0, &mut receiver_out)?;
    }

    t.tick();
    let sender_output = match &view.x {
        Some(x) => {
            let out = SenderOutput { s0: extract(x, &view.b, &view.r0, 0)?, s1: extract(x, &view.b, &view.r1, 1)? };
            t.local(sender_party, &out.s0.concat(&out.s1), "output s0||s1");
            Some(out)
        }
        None => None,
    };
    match (&receiver_out.c, &receiver_out.y) {
        (Some(c), Some(y)) => {
            t.local(receiver_party, &BitString::from_u64(*c as u64, 1).concat(y), "output c||y");
        }
        _ => {
            t.local(receiver_party, &BitString::zeros(0), format!("output k_out bits={}", receiver_out.k_out.len()));
        }
    }
    Ok(BqsOtRun {
        sender_view: view,
        sender_output,
        receiver: receiver_out,
        transcript: t,
        within_bound: cfg.within_bound()?,
    })
}

/// One execution with A as sender and B as receiver.
pub fn run_bqs_ot<R: Rng + ?Sized>(
    sender: &PlayerProgram,
    receiver: &PlayerProgram,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<BqsOtRun, EngineError> {
    run_roles(sender, receiver, cfg, Party::A, rng)
}

/// The same protocol with the roles swapped: B sends, A receives.
pub fn run_bqs_to<R: Rng + ?Sized>(
    sender: &PlayerProgram,
    receiver: &PlayerProgram,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<BqsOtRun, EngineError> {
    run_roles(sender, receiver, cfg, Party::B, rng)
}

/// Two parallel executions with swapped roles: Alice sends in the first and
/// receives in the second.
#[derive(Clone, Debug)]
pub struct ReflectionRun {
    /// Alice's outputs in the first execution.
    pub first: SenderOutput,
    /// Alice's `(c, y)` in the second execution.
    pub second_c: u8,
    pub second_y: BitString,
    /// `y` equals one of the first execution's strings.
    pub y_in_first_pair: bool,
    /// Qubits Bob held at any memory-bound point.
    pub bob_qubits: usize,
    pub transcripts: [Transcript; 2],
}

/// With `attack`, Bob returns Alice's qubits unmeasured as his own and
/// repeats her `(b, r0, r1)`; otherwise he plays both executions honestly.
pub fn run_reflection<R: Rng + ?Sized>(cfg: &ProtocolConfig, attack: bool, rng: &mut R) -> Result<ReflectionRun, EngineError> {
    cfg.validate()?;
    let mut t1 = Transcript::new();
    let mut t2 = Transcript::new();
    for t in [&mut t1, &mut t2] {
        t.tick();
    }
    let alice = prepare_sender(&PlayerProgram::Honest, cfg, rng)?;
    t1.send_qubits(Party::A, cfg.n, "bb84");
    let (bob_view, bob_qubits_out, bob_holding) = if attack {
        (None, alice.qubits.clone(), None)
    } else {
        let bob = prepare_sender(&PlayerProgram::Honest, cfg, rng)?;
        let holding = receive(&PlayerProgram::Honest, alice.qubits.clone(), rng)?;
        (Some(bob.view), bob.qubits, Some(holding))
    };
    t2.send_qubits(Party::B, cfg.n, if attack { "reflected" } else { "bb84" });
    let alice_holding = receive(&PlayerProgram::Honest, bob_qubits_out, rng)?;
    let bob_held = 0;
    for t in [&mut t1, &mut t2] {
        t.tick();
    }
    t1.local(Party::B, &BitString::zeros(0), format!("memory-bound point=before-step-3 held={bob_held} bound={}", cfg.m));
    for t in [&mut t1, &mut t2] {
        t.tick();
    }
    let alice_view = alice.view;
    t1.send_bits(Party::A, &alice_view.message(), "bases-and-seeds");
    let second_view = bob_view.clone().unwrap_or_else(|| alice_view.clone());
    t2.send_bits(Party::B, &second_view.message(), if attack { "repeated" } else { "bases-and-seeds" });
    if let Some(h) = bob_holding {
        finish_receiver(h, &alice_view, rng)?;
    }
    let alice_second = finish_receiver(alice_holding, &second_view, rng)?;
    let x = alice_view.x.as_ref().expect("honest sender knows x");
    let first = SenderOutput { s0: extract(x, &alice_view.b, &alice_view.r0, 0)?, s1: extract(x, &alice_view.b, &alice_view.r1, 1)? };
    let second_c = alice_second.c.expect("honest receiver outputs c");
    let second_y = alice_second.y.expect("honest receiver outputs y");
    for t in [&mut t1, &mut t2] {
        t.tick();
    }
    t1.local(Party::A, &first.s0.concat(&first.s1), "output s0||s1");
    t2.local(Party::A, &BitString::from_u64(second_c as u64, 1).concat(&second_y), "output c||y");
    Ok(ReflectionRun {
        y_in_first_pair: second_y == first.s0 || second_y == first.s1,
        first,
        second_c,
        second_y,
        bob_qubits: bob_held,
        transcripts: [t1, t2],
    })
}
