//! Ideal functionalities, the BQS-OT protocol, the classical reductions built
//! on it, the proof simulators and the sequential composition runner.
//!
//! One execution is single-threaded and driven by a global round counter;
//! independent trials own their RNG streams and transcripts.

pub mod bqs_ot;
pub mod compose;
pub mod functionality;
pub mod reductions;
pub mod simulators;
pub mod transcript;

use thiserror::Error;

use crate::adversary::AdversaryError;
use crate::bits::BitsError;
use crate::bounds::BoundsError;
use crate::entropy::EntropyError;
use crate::hashpa::HashError;
use crate::qstate::QStateError;

pub use bqs_ot::{
    run_bqs_ot, run_bqs_to, run_reflection, BqsOtRun, PlayerProgram, ProtocolConfig, ReceiverOutput, ReflectionRun,
    SenderOutput, SenderView,
};
pub use compose::{compose_bc, ComposeConfig, ComposedRun, InnerTor};
pub use functionality::{
    ideal_ot, ideal_rot, run_ideal, Corruption, FunctionalityKind, FunctionalitySpec, IdealBc, IdealInput, IdealOutput,
    RotOutput,
};
pub use reductions::{run_bc, run_ot_from_rot, BcRun, Committer, OtFromRotRun};
pub use simulators::{simulate_receiver, simulate_sender, ReceiverSimulation, ReceiverSimulator, SenderSimulation};
pub use transcript::{Channel, Direction, Party, Payload, Transcript, TranscriptRow};

/// Enumeration budget for the receiver simulator, in support entries.
pub const DEFAULT_SUPPORT_BUDGET: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("phase order violated: {0}")]
    PhaseOrder(String),
    #[error("protocol {requested:?} started while {active:?} is active")]
    Concurrency { active: String, requested: String },
    #[error("memory bound violated at {point}: {held} qubits held, bound {bound}")]
    MemoryBoundViolation { point: String, held: usize, bound: usize },
    #[error("strategy rejected: {0}")]
    StrategyRejected(#[from] AdversaryError),
    #[error("ℓ = {ell} exceeds the largest secure output length {max_ell}")]
    Infeasible { ell: usize, max_ell: u64 },
    #[error("enumerating {support} support entries exceeds the budget of {budget}")]
    Budget { support: usize, budget: usize },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    QState(#[from] QStateError),
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Bits(#[from] BitsError),
}

impl EngineError {
    /// Whether the error reports a broken invariant or infeasible parameters
    /// rather than bad usage.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            EngineError::MemoryBoundViolation { .. }
                | EngineError::StrategyRejected(_)
                | EngineError::Infeasible { .. }
                | EngineError::Concurrency { .. }
                | EngineError::PhaseOrder(_)
        )
    }
}
