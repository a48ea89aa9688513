//! Oblivious transfer and bit commitment in the bounded-quantum-storage model.
//!
//! The crate is a desk-scale laboratory: it runs the BB84-based randomized OT
//! protocol and the classical reductions built on top of it, mounts the known
//! attacks against them, implements the proof simulators, and checks the
//! entropy lemmas the security argument rests on against brute-force oracles.
//!
//! Module map:
//!
//! * [`qstate`]: exact simulation of small quantum registers.
//! * [`hashpa`]: the two-universal GF(2) linear hash family and privacy
//!   amplification.
//! * [`entropy`]: finite joint distributions, (smooth) min-entropy and the
//!   lemma checkers.
//! * [`bounds`]: closed-form parameter calculator.
//! * [`engine`]: ideal functionalities, protocol state machines, simulators
//!   and the sequential composition runner.
//! * [`adversary`]: declarative cheating strategies.
//! * [`harness`]: experiment runner, distinguisher, statistics and
//!   persistence.

pub mod adversary;
pub mod bits;
pub mod bounds;
pub mod engine;
pub mod entropy;
pub mod harness;
pub mod hashpa;
pub mod qstate;
pub mod rng;

pub use bits::{Basis, BasisString, BitString};
pub use rng::{trial_rng, TrialRng};
