//! Ideal functionalities: randomized OT in both directions, OT and bit
//! commitment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::transcript::Party;
use super::EngineError;
use crate::bits::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalityKind {
    Rot,
    /// ROT with the roles of the players swapped: B holds the strings.
    Tor,
    Ot,
    Bc,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corruption {
    #[default]
    None,
    A,
    B,
}

impl Corruption {
    pub fn party(self) -> Option<Party> {
        match self {
            Corruption::None => None,
            Corruption::A => Some(Party::A),
            Corruption::B => Some(Party::B),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalitySpec {
    pub kind: FunctionalityKind,
    pub ell: usize,
    pub corruption: Corruption,
}

impl FunctionalitySpec {
    pub fn new(kind: FunctionalityKind, ell: usize, corruption: Corruption) -> Self {
        Self { kind, ell, corruption }
    }

    /// The party holding `(x0, x1)` in ROT and TOR, the sender in OT and the
    /// committer in BC.
    pub fn sender(&self) -> Party {
        match self.kind {
            FunctionalityKind::Tor => Party::B,
            _ => Party::A,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealInput {
    /// Honest variants of ROT and TOR take no input.
    None,
    /// Strings submitted by a corrupted ROT/TOR sender.
    Strings { x0: BitString, x1: BitString },
    /// Choice and string submitted by a corrupted ROT/TOR receiver.
    Choice { c: u8, y: BitString },
    Ot { x0: BitString, x1: BitString, c: u8 },
    Bc { b: u8, a: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotOutput {
    pub x0: BitString,
    pub x1: BitString,
    pub c: u8,
    pub y: BitString,
}

impl RotOutput {
    pub fn strings(&self) -> [&BitString; 2] {
        [&self.x0, &self.x1]
    }

    pub fn x(&self, i: u8) -> &BitString {
        if i == 0 {
            &self.x0
        } else {
            &self.x1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IdealOutput {
    Rot(RotOutput),
    Tor(RotOutput),
    Ot { y: BitString },
    Bc { output: Option<u8> },
}

fn check_bit(name: &'static str, v: u8) -> Result<u8, EngineError> {
    if v > 1 {
        return Err(EngineError::InvalidInput(format!("{name} must be a bit, got {v}")));
    }
    Ok(v)
}

fn check_len(s: &BitString, ell: usize) -> Result<(), EngineError> {
    if s.len() != ell {
        return Err(EngineError::LengthMismatch { expected: ell, got: s.len() });
    }
    Ok(())
}

/// Randomized OT of `ℓ`-bit strings. `corrupt` names the corrupted player,
/// which must supply its input; the honest variant takes none.
pub fn ideal_rot<R: Rng + ?Sized>(
    ell: usize,
    sender: Party,
    corrupt: Corruption,
    input: &IdealInput,
    rng: &mut R,
) -> Result<RotOutput, EngineError> {
    if ell == 0 {
        return Err(EngineError::InvalidInput("ℓ must be positive".into()));
    }
    match (corrupt.party(), input) {
        (None, IdealInput::None) => {
            let x0 = BitString::random(ell, rng);
            let x1 = BitString::random(ell, rng);
            let c = rng.gen_range(0..2u8);
            let y = if c == 0 { x0.clone() } else { x1.clone() };
            Ok(RotOutput { x0, x1, c, y })
        }
        (Some(p), IdealInput::Strings { x0, x1 }) if p == sender => {
            check_len(x0, ell)?;
            check_len(x1, ell)?;
            let c = rng.gen_range(0..2u8);
            let y = if c == 0 { x0.clone() } else { x1.clone() };
            Ok(RotOutput { x0: x0.clone(), x1: x1.clone(), c, y })
        }
        (Some(p), IdealInput::Choice { c, y }) if p != sender => {
            let c = check_bit("c", *c)?;
            check_len(y, ell)?;
            let other = BitString::random(ell, rng);
            let (x0, x1) = if c == 0 { (y.clone(), other) } else { (other, y.clone()) };
            Ok(RotOutput { x0, x1, c, y: y.clone() })
        }
        _ => Err(EngineError::InvalidInput(format!("input {input:?} does not match corruption {corrupt:?}"))),
    }
}

pub fn ideal_ot(x0: &BitString, x1: &BitString, c: u8) -> Result<BitString, EngineError> {
    if x0.len() != x1.len() {
        return Err(EngineError::LengthMismatch { expected: x0.len(), got: x1.len() });
    }
    Ok(if check_bit("c", c)? == 0 { x0.clone() } else { x1.clone() })
}

/// Two-phase bit commitment: `commit` then `open`, each at most once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdealBc {
    committed: Option<u8>,
    opened: bool,
}

impl IdealBc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn committed(&self) -> Option<u8> {
        self.committed
    }

    pub fn opened(&self) -> bool {
        self.opened
    }

    /// Stores `b`; the verifier learns only that a commitment happened.
    pub fn commit(&mut self, b: u8) -> Result<(), EngineError> {
        let b = check_bit("b", b)?;
        if self.committed.is_some() {
            return Err(EngineError::PhaseOrder("already committed".into()));
        }
        self.committed = Some(b);
        Ok(())
    }

    /// Reveals the committed bit to the verifier if `a = 1`, else `⊥`.
    pub fn open(&mut self, a: u8) -> Result<Option<u8>, EngineError> {
        let a = check_bit("a", a)?;
        let b = self.committed.ok_or_else(|| EngineError::PhaseOrder("open before commit".into()))?;
        if self.opened {
            return Err(EngineError::PhaseOrder("already opened".into()));
        }
        self.opened = true;
        Ok((a == 1).then_some(b))
    }
}

pub fn run_ideal<R: Rng + ?Sized>(
    spec: &FunctionalitySpec,
    input: &IdealInput,
    rng: &mut R,
) -> Result<IdealOutput, EngineError> {
    match spec.kind {
        FunctionalityKind::Rot => ideal_rot(spec.ell, spec.sender(), spec.corruption, input, rng).map(IdealOutput::Rot),
        FunctionalityKind::Tor => ideal_rot(spec.ell, spec.sender(), spec.corruption, input, rng).map(IdealOutput::Tor),
        FunctionalityKind::Ot => match input {
            IdealInput::Ot { x0, x1, c } => {
                check_len(x0, spec.ell)?;
                Ok(IdealOutput::Ot { y: ideal_ot(x0, x1, *c)? })
            }
            _ => Err(EngineError::InvalidInput("OT takes (x0, x1, c)".into())),
        },
        FunctionalityKind::Bc => match input {
            IdealInput::Bc { b, a } => {
                let mut bc = IdealBc::new();
                bc.commit(*b)?;
                Ok(IdealOutput::Bc { output: bc.open(*a)? })
            }
            _ => Err(EngineError::InvalidInput("BC takes (b, a)".into())),
        },
    }
}
