//! Classical reductions: OT from randomized OT, and bit commitment from
//! randomized OT with the roles reversed.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::functionality::{ideal_rot, Corruption, IdealInput, RotOutput};
use super::transcript::{Channel, Direction, Party, Payload, Transcript};
use super::EngineError;
use crate::bits::BitString;

fn pick(i: u8, a: &BitString, b: &BitString) -> BitString {
    if i == 0 {
        a.clone()
    } else {
        b.clone()
    }
}

fn bit(v: u8) -> BitString {
    BitString::from_u64(v as u64, 1)
}

fn check_bit(name: &str, v: u8) -> Result<u8, EngineError> {
    if v > 1 {
        return Err(EngineError::InvalidInput(format!("{name} must be a bit, got {v}")));
    }
    Ok(v)
}

fn record_rot(t: &mut Transcript, sender: Party, rot: &RotOutput) {
    t.record(Channel::Ideal, Direction::FromIdeal(sender), Payload::Bits(rot.x0.concat(&rot.x1)), "rot x0||x1");
    t.record(
        Channel::Ideal,
        Direction::FromIdeal(sender.other()),
        Payload::Bits(bit(rot.c).concat(&rot.y)),
        "rot c||y",
    );
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OtMessages {
    pub d: u8,
    pub m0: BitString,
    pub m1: BitString,
    pub y: BitString,
}

/// Both players' steps on top of a given ROT outcome:
/// `d = c′ ⊕ c`, `m_i = x_i ⊕ x′_{i⊕d}`, `y = m_c ⊕ y′`.
pub fn ot_from_rot_messages(x0: &BitString, x1: &BitString, c: u8, rot: &RotOutput) -> Result<OtMessages, EngineError> {
    let c = check_bit("c", c)?;
    if x0.len() != x1.len() {
        return Err(EngineError::LengthMismatch { expected: x0.len(), got: x1.len() });
    }
    if rot.x0.len() != x0.len() {
        return Err(EngineError::LengthMismatch { expected: x0.len(), got: rot.x0.len() });
    }
    let d = rot.c ^ c;
    let m0 = x0.xor(rot.x(d))?;
    let m1 = x1.xor(rot.x(1 ^ d))?;
    let y = pick(c, &m0, &m1).xor(&rot.y)?;
    Ok(OtMessages { d, m0, m1, y })
}

#[derive(Clone, Debug)]
pub struct OtFromRotRun {
    pub rot: RotOutput,
    pub messages: OtMessages,
    pub y: BitString,
    pub transcript: Transcript,
}

/// OT on top of a supplied ROT outcome; `rot_transcript` is the transcript of
/// whatever produced it.
pub fn run_ot_from_rot_with(
    x0: &BitString,
    x1: &BitString,
    c: u8,
    rot: RotOutput,
    rot_transcript: Option<Transcript>,
) -> Result<OtFromRotRun, EngineError> {
    let messages = ot_from_rot_messages(x0, x1, c, &rot)?;
    let mut t = Transcript::new();
    t.begin_phase("rot")?;
    match rot_transcript {
        Some(inner) => t.absorb(inner)?,
        None => record_rot(&mut t, Party::A, &rot),
    }
    t.end_phase("rot")?;
    t.begin_phase("ot")?;
    t.tick();
    t.send_bits(Party::B, &bit(messages.d), "d");
    t.tick();
    t.send_bits(Party::A, &messages.m0.concat(&messages.m1), "m0||m1");
    t.tick();
    t.local(Party::B, &messages.y, "output y");
    t.end_phase("ot")?;
    Ok(OtFromRotRun { y: messages.y.clone(), rot, messages, transcript: t })
}

/// OT of `ℓ`-bit strings from one call to ideal ROT.
pub fn run_ot_from_rot<R: Rng + ?Sized>(
    x0: &BitString,
    x1: &BitString,
    c: u8,
    rng: &mut R,
) -> Result<OtFromRotRun, EngineError> {
    if x0.len() != x1.len() {
        return Err(EngineError::LengthMismatch { expected: x0.len(), got: x1.len() });
    }
    let rot = ideal_rot(x0.len(), Party::A, Corruption::None, &IdealInput::None, rng)?;
    run_ot_from_rot_with(x0, x1, c, rot, None)
}

/// Exact output distributions of a real run and of its simulation, as
/// outcome counts over a common number of equally likely elementary events.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactComparison {
    pub real: BTreeMap<String, u64>,
    pub ideal: BTreeMap<String, u64>,
    pub total: u64,
}

impl ExactComparison {
    pub fn identical(&self) -> bool {
        self.real == self.ideal
    }

    pub fn tv(&self) -> f64 {
        let keys: std::collections::BTreeSet<&String> = self.real.keys().chain(self.ideal.keys()).collect();
        let diff: u64 = keys
            .into_iter()
            .map(|k| {
                let a = self.real.get(k).copied().unwrap_or(0);
                let b = self.ideal.get(k).copied().unwrap_or(0);
                a.abs_diff(b)
            })
            .sum();
        diff as f64 / (2 * self.total) as f64
    }
}

fn all_strings(ell: usize) -> Vec<BitString> {
    (0..1u64 << ell).map(|v| BitString::from_u64(v, ell)).collect()
}

/// A corrupted OT sender: `(x′0, x′1, d) ↦ (m0, m1)`.
pub type OtSenderStrategy<'a> = &'a dyn Fn(&BitString, &BitString, u8) -> (BitString, BitString);
/// A corrupted OT receiver: `(c′, y′) ↦ d`.
pub type OtReceiverStrategy<'a> = &'a dyn Fn(u8, &BitString) -> u8;

/// Corrupted sender against honest receiver with choice `c`. The simulator
/// hands the adversary a fresh ROT pair and a random `d`, then inputs
/// `x_i = m_i ⊕ x′_{i⊕d}` to ideal OT. Outcomes are the adversary's view
/// `(x′0, x′1, d)` joined with the receiver's output.
pub fn ot_sender_corruption_exact(ell: usize, c: u8, adversary: OtSenderStrategy<'_>) -> Result<ExactComparison, EngineError> {
    let c = check_bit("c", c)?;
    let strings = all_strings(ell);
    let mut real = BTreeMap::new();
    let mut ideal = BTreeMap::new();
    for xp0 in &strings {
        for xp1 in &strings {
            for cp in 0..2u8 {
                let d = cp ^ c;
                let (m0, m1) = adversary(xp0, xp1, d);
                let y = pick(c, &m0, &m1).xor(&pick(cp, xp0, xp1))?;
                *real.entry(format!("{xp0}|{xp1}|{d}|{y}")).or_insert(0) += 1;
            }
            for d in 0..2u8 {
                let (m0, m1) = adversary(xp0, xp1, d);
                let x0 = m0.xor(&pick(d, xp0, xp1))?;
                let x1 = m1.xor(&pick(1 ^ d, xp0, xp1))?;
                let y = pick(c, &x0, &x1);
                *ideal.entry(format!("{xp0}|{xp1}|{d}|{y}")).or_insert(0) += 1;
            }
        }
    }
    Ok(ExactComparison { real, ideal, total: 2 << (2 * ell) })
}

/// Corrupted receiver against honest sender with inputs `(x0, x1)`. The
/// simulator hands the adversary a random `(c′, y′)`, reads `d`, asks ideal
/// OT for `y = x_c` with `c = c′ ⊕ d`, and answers with `m_c = y ⊕ y′` and a
/// random `m_{1−c}`. Outcomes are the adversary's view `(c′, y′, m0, m1)`.
pub fn ot_receiver_corruption_exact(
    x0: &BitString,
    x1: &BitString,
    adversary: OtReceiverStrategy<'_>,
) -> Result<ExactComparison, EngineError> {
    let ell = x0.len();
    if x1.len() != ell {
        return Err(EngineError::LengthMismatch { expected: ell, got: x1.len() });
    }
    let strings = all_strings(ell);
    let mut real = BTreeMap::new();
    let mut ideal = BTreeMap::new();
    for xp0 in &strings {
        for xp1 in &strings {
            for cp in 0..2u8 {
                let yp = pick(cp, xp0, xp1);
                let d = adversary(cp, &yp) & 1;
                let m0 = x0.xor(&pick(d, xp0, xp1))?;
                let m1 = x1.xor(&pick(1 ^ d, xp0, xp1))?;
                *real.entry(format!("{cp}|{yp}|{m0}|{m1}")).or_insert(0) += 1;
            }
        }
    }
    for cp in 0..2u8 {
        for yp in &strings {
            let d = adversary(cp, yp) & 1;
            let c = cp ^ d;
            let known = pick(c, x0, x1).xor(yp)?;
            for other in &strings {
                let (m0, m1) = if c == 0 { (known.clone(), other.clone()) } else { (other.clone(), known.clone()) };
                *ideal.entry(format!("{cp}|{yp}|{m0}|{m1}")).or_insert(0) += 1;
            }
        }
    }
    Ok(ExactComparison { real, ideal, total: 2 << (2 * ell) })
}

/// How the committer behaves in the commitment built on reversed ROT.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Committer {
    #[default]
    Honest,
    /// Commits honestly, then opens the other bit with a uniform guess for `y`.
    BindingCheat,
}

#[derive(Clone, Debug, Serialize)]
pub struct BcRun {
    pub b: u8,
    /// The commit message `m = b ⊕ c`.
    pub m: u8,
    /// What the committer sent at opening, `None` for `(⊥, ⊥)`.
    pub opening: Option<(u8, BitString)>,
    pub verifier_output: Option<u8>,
    /// For a cheating committer: whether the verifier accepted `1 − b`.
    pub cheat_success: Option<bool>,
    pub tor: RotOutput,
    #[serde(skip)]
    pub transcript: Transcript,
}

/// Commit phase on a finished reversed-ROT outcome: the committer (A)
/// holds `(c, y)`, the verifier (B) holds `(x0, x1)`.
pub fn bc_commit(b: u8, tor: &RotOutput, t: &mut Transcript) -> Result<u8, EngineError> {
    let m = check_bit("b", b)? ^ tor.c;
    t.tick();
    t.send_bits(Party::A, &bit(m), "commit m");
    Ok(m)
}

/// An opening `(b′, y)`.
pub type Opening = (u8, BitString);

/// Opening phase; returns the opening sent and the verifier's output.
pub fn bc_open<R: Rng + ?Sized>(
    b: u8,
    a: u8,
    m: u8,
    committer: Committer,
    tor: &RotOutput,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<(Option<Opening>, Option<u8>), EngineError> {
    let a = check_bit("a", a)?;
    let opening = match (a, committer) {
        (0, _) => None,
        (_, Committer::Honest) => Some((b, tor.y.clone())),
        (_, Committer::BindingCheat) => Some((1 ^ b, BitString::random(tor.y.len(), rng))),
    };
    t.tick();
    match &opening {
        Some((ob, y)) => t.send_bits(Party::A, &bit(*ob).concat(y), "open b||y"),
        None => t.send_bits(Party::A, &BitString::zeros(0), "open bottom"),
    }
    let output = opening.as_ref().and_then(|(ob, y)| (tor.x(ob ^ m) == y).then_some(*ob));
    t.tick();
    match output {
        Some(v) => t.local(Party::B, &bit(v), "output b"),
        None => t.local(Party::B, &BitString::zeros(0), "output bottom"),
    }
    Ok((opening, output))
}

/// Full commitment on a given reversed-ROT outcome.
pub fn run_bc_with<R: Rng + ?Sized>(
    b: u8,
    a: u8,
    committer: Committer,
    tor: RotOutput,
    tor_transcript: Option<Transcript>,
    rng: &mut R,
) -> Result<BcRun, EngineError> {
    let mut t = Transcript::new();
    t.begin_phase("commit")?;
    match tor_transcript {
        Some(inner) => t.absorb(inner)?,
        None => record_rot(&mut t, Party::B, &tor),
    }
    let m = bc_commit(b, &tor, &mut t)?;
    t.end_phase("commit")?;
    t.begin_phase("open")?;
    let (opening, verifier_output) = bc_open(b, a, m, committer, &tor, &mut t, rng)?;
    t.end_phase("open")?;
    let cheat_success = (committer == Committer::BindingCheat).then(|| verifier_output == Some(1 ^ b));
    Ok(BcRun { b, m, opening, verifier_output, cheat_success, tor, transcript: t })
}

/// Commit to `b` and open if `a = 1`, over ideal reversed ROT of `ℓ`-bit
/// strings.
pub fn run_bc<R: Rng + ?Sized>(b: u8, a: u8, ell: usize, committer: Committer, rng: &mut R) -> Result<BcRun, EngineError> {
    check_bit("b", b)?;
    let tor = ideal_rot(ell, Party::B, Corruption::None, &IdealInput::None, rng)?;
    run_bc_with(b, a, committer, tor, None, rng)
}

/// Distribution of the commit message for bit `b`, by enumeration over `c`.
pub fn bc_commit_distribution(b: u8) -> Result<BTreeMap<u8, u64>, EngineError> {
    let b = check_bit("b", b)?;
    let mut out = BTreeMap::new();
    for c in 0..2u8 {
        *out.entry(b ^ c).or_insert(0) += 1;
    }
    Ok(out)
}

/// A corrupted committer: commit message from `(c, y)`, then an opening
/// `(b′, y″)` or `None` from `(c, y, m)`.
pub type CommitterStrategy<'a> = &'a dyn Fn(u8, &BitString) -> (u8, Option<(u8, BitString)>);

/// Corrupted committer against the honest verifier. The simulator hands the
/// adversary `(c, y)`, commits `c ⊕ m` to ideal BC and opens iff the
/// adversary opens that same bit with the right `y`. Outcomes are
/// `(c, y, verifier output)`; the distance is the binding error.
pub fn bc_committer_corruption_exact(ell: usize, adversary: CommitterStrategy<'_>) -> Result<ExactComparison, EngineError> {
    let strings = all_strings(ell);
    let show = |o: Option<u8>| o.map_or("⊥".to_string(), |v| v.to_string());
    let mut real = BTreeMap::new();
    let mut ideal = BTreeMap::new();
    for x0 in &strings {
        for x1 in &strings {
            for c in 0..2u8 {
                let y = pick(c, x0, x1);
                let (m, opening) = adversary(c, &y);
                let m = m & 1;
                let out = opening.as_ref().and_then(|(ob, yy)| (&pick(ob ^ m, x0, x1) == yy).then_some(*ob));
                *real.entry(format!("{c}|{y}|{}", show(out))).or_insert(0) += 1;
                let committed = c ^ m;
                let ideal_out = opening.as_ref().and_then(|(ob, yy)| (*ob == committed && *yy == y).then_some(committed));
                *ideal.entry(format!("{c}|{y}|{}", show(ideal_out))).or_insert(0) += 1;
            }
        }
    }
    Ok(ExactComparison { real, ideal, total: 2 << (2 * ell) })
}

/// Corrupted verifier against an honest committer with bit `b` who opens.
/// The simulator hands the adversary `(x0, x1)` and a random `m`, learns
/// `b` from ideal BC at opening and answers `(b, x_{b⊕m})`. Outcomes are the
/// adversary's view `(x0, x1, m, opening)`.
pub fn bc_verifier_corruption_exact(ell: usize, b: u8) -> Result<ExactComparison, EngineError> {
    let b = check_bit("b", b)?;
    let strings = all_strings(ell);
    let mut real = BTreeMap::new();
    let mut ideal = BTreeMap::new();
    for x0 in &strings {
        for x1 in &strings {
            for c in 0..2u8 {
                let m = b ^ c;
                let y = pick(c, x0, x1);
                *real.entry(format!("{x0}|{x1}|{m}|{b}|{y}")).or_insert(0) += 1;
            }
            for m in 0..2u8 {
                let y = pick(b ^ m, x0, x1);
                *ideal.entry(format!("{x0}|{x1}|{m}|{b}|{y}")).or_insert(0) += 1;
            }
        }
    }
    Ok(ExactComparison { real, ideal, total: 2 << (2 * ell) })
}
