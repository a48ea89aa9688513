//! Sequential composition: bit commitment over reversed OT, where the
//! reversed OT is either ideal or the BQS protocol with swapped roles.

use rand::Rng;
use serde::Serialize;

use super::bqs_ot::{run_bqs_to, PlayerProgram, ProtocolConfig};
use super::functionality::{ideal_rot, Corruption, IdealInput, RotOutput};
use super::reductions::{bc_commit, bc_open, Committer};
use super::transcript::{Channel, Direction, Party, Payload, Transcript};
use super::EngineError;
use crate::bounds::{composed_bc_error, ComposedError};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InnerTor {
    Ideal,
    BqsTo(ProtocolConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComposeConfig {
    pub ell: usize,
    pub eps: f64,
    pub inner: InnerTor,
    pub committer: Committer,
}

impl ComposeConfig {
    pub fn ideal(ell: usize, eps: f64) -> Self {
        Self { ell, eps, inner: InnerTor::Ideal, committer: Committer::Honest }
    }

    pub fn bqs(n: usize, ell: usize, eps: f64) -> Self {
        let mut cfg = ProtocolConfig::new(n, ell);
        cfg.eps = eps;
        Self { ell, eps, inner: InnerTor::BqsTo(cfg), committer: Committer::Honest }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhaseSummary {
    pub name: String,
    pub first_round: u32,
    pub last_round: u32,
    pub events: usize,
}

/// What the composed simulator carries from one phase to the next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SimulatorMemory {
    /// Classical bits kept between commit and open: `m` and the verifier's
    /// two strings.
    pub classical_bits: usize,
    /// Qubits held at any point; measured from the inner run.
    pub qubits: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComposedRun {
    pub b: u8,
    pub a: u8,
    pub m: u8,
    pub verifier_output: Option<u8>,
    pub cheat_success: Option<bool>,
    pub phases: Vec<PhaseSummary>,
    pub error_budget: ComposedError,
    /// `ℓ` equals the budget's `⌈log(1/ε)⌉`.
    pub ell_matches_eps: bool,
    pub simulator_memory: SimulatorMemory,
    pub inner_within_bound: Option<bool>,
    #[serde(skip)]
    pub transcript: Transcript,
}

fn phase<T>(
    t: &mut Transcript,
    name: &str,
    phases: &mut Vec<PhaseSummary>,
    body: impl FnOnce(&mut Transcript) -> Result<T, EngineError>,
) -> Result<T, EngineError> {
    let start = t.len();
    t.begin_phase(name)?;
    let first_round = t.round();
    let out = body(t)?;
    t.end_phase(name)?;
    phases.push(PhaseSummary { name: name.to_string(), first_round, last_round: t.round(), events: t.len() - start });
    Ok(out)
}

/// Runs the stack into `t`, which must have no open phase.
pub fn compose_bc_into<R: Rng + ?Sized>(
    t: &mut Transcript,
    b: u8,
    a: u8,
    cfg: &ComposeConfig,
    rng: &mut R,
) -> Result<ComposedRun, EngineError> {
    if let Some(active) = t.active_phase() {
        return Err(EngineError::Concurrency { active: active.to_string(), requested: "compose-bc".into() });
    }
    if b > 1 || a > 1 {
        return Err(EngineError::InvalidInput(format!("b = {b}, a = {a} must be bits")));
    }
    let error_budget = composed_bc_error(cfg.eps)?;
    let mut phases = Vec::new();
    let mut qubits = 0;
    let mut inner_within_bound = None;
    let tor: RotOutput = phase(t, "tor", &mut phases, |t| match &cfg.inner {
        InnerTor::Ideal => {
            let tor = ideal_rot(cfg.ell, Party::B, Corruption::None, &IdealInput::None, rng)?;
            t.tick();
            t.record(Channel::Ideal, Direction::FromIdeal(Party::B), Payload::Bits(tor.x0.concat(&tor.x1)), "tor x0||x1");
            t.record(
                Channel::Ideal,
                Direction::FromIdeal(Party::A),
                Payload::Bits(crate::bits::BitString::from_u64(tor.c as u64, 1).concat(&tor.y)),
                "tor c||y",
            );
            Ok(tor)
        }
        InnerTor::BqsTo(pc) => {
            if pc.ell != cfg.ell {
                return Err(EngineError::InvalidInput(format!("inner ℓ = {} but outer ℓ = {}", pc.ell, cfg.ell)));
            }
            let run = run_bqs_to(&PlayerProgram::Honest, &PlayerProgram::Honest, pc, rng)?;
            qubits = run.receiver.max_qubits_held;
            inner_within_bound = Some(run.within_bound);
            let s = run.sender_output.expect("honest sender");
            let tor = RotOutput {
                x0: s.s0,
                x1: s.s1,
                c: run.receiver.c.expect("honest receiver"),
                y: run.receiver.y.expect("honest receiver"),
            };
            t.absorb(run.transcript)?;
            Ok(tor)
        }
    })?;
    let m = phase(t, "commit", &mut phases, |t| bc_commit(b, &tor, t))?;
    let (_, verifier_output) = phase(t, "open", &mut phases, |t| bc_open(b, a, m, cfg.committer, &tor, t, rng))?;
    Ok(ComposedRun {
        b,
        a,
        m,
        verifier_output,
        cheat_success: (cfg.committer == Committer::BindingCheat).then(|| verifier_output == Some(1 ^ b)),
        phases,
        ell_matches_eps: error_budget.ell == cfg.ell as u64,
        error_budget,
        simulator_memory: SimulatorMemory { classical_bits: 1 + 2 * cfg.ell, qubits },
        inner_within_bound,
        transcript: Transcript::new(),
    })
}

/// Commit to `b` and open if `a = 1` through the whole stack.
pub fn compose_bc<R: Rng + ?Sized>(b: u8, a: u8, cfg: &ComposeConfig, rng: &mut R) -> Result<ComposedRun, EngineError> {
    let mut t = Transcript::new();
    let mut run = compose_bc_into(&mut t, b, a, cfg, rng)?;
    run.transcript = t;
    Ok(run)
}
