//! Protocol transcripts and their JSONL form.
//!
//! Quantum traffic is logged as a state handle plus metadata; amplitudes
//! never appear in a transcript.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::bits::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    #[serde(rename = "Comm")]
    Comm,
    #[serde(rename = "Q-Comm")]
    QComm,
    /// Calls to an ideal functionality.
    #[serde(rename = "Ideal")]
    Ideal,
    /// Events inside one party: memory-bound points, outputs, phase markers.
    #[serde(rename = "Local")]
    Local,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Comm => "Comm",
            Channel::QComm => "Q-Comm",
            Channel::Ideal => "Ideal",
            Channel::Local => "Local",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Send { from: Party, to: Party },
    /// To or from the ideal functionality.
    ToIdeal(Party),
    FromIdeal(Party),
    At(Party),
    Both,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Send { from, to } => write!(f, "{from}->{to}"),
            Direction::ToIdeal(p) => write!(f, "{p}->F"),
            Direction::FromIdeal(p) => write!(f, "F->{p}"),
            Direction::At(p) => write!(f, "{p}"),
            Direction::Both => f.write_str("*"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Payload {
    Bits(BitString),
    /// A handle to a quantum register travelling over Q-Comm.
    State { id: u32, qubits: usize },
}

impl Payload {
    pub fn empty() -> Self {
        Payload::Bits(BitString::zeros(0))
    }

    pub fn to_hex(&self) -> String {
        match self {
            Payload::Bits(b) => b.to_hex(),
            Payload::State { id, .. } => format!("{id:08x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub round: u32,
    pub channel: Channel,
    pub dir: Direction,
    pub payload: Payload,
    pub event: String,
}

/// One JSONL row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRow {
    pub trial: u64,
    pub round: u32,
    pub channel: Channel,
    pub dir: String,
    pub payload_hex: String,
    pub event: String,
}

/// Ordered events of one execution. Rounds never decrease, and at most one
/// protocol phase is open at a time.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    events: Vec<Event>,
    round: u32,
    active: Option<String>,
    next_state: u32,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    /// Moves the clock forward one round and returns the new round.
    pub fn tick(&mut self) -> u32 {
        self.round += 1;
        self.round
    }

    pub fn active_phase(&self) -> Option<&str> {
        self.active.as_deref()
    }

    pub fn record(&mut self, channel: Channel, dir: Direction, payload: Payload, event: impl Into<String>) {
        self.events.push(Event { round: self.round, channel, dir, payload, event: event.into() });
    }

    pub fn send_bits(&mut self, from: Party, bits: &BitString, event: &str) {
        self.record(Channel::Comm, Direction::Send { from, to: from.other() }, Payload::Bits(bits.clone()), event);
    }

    /// Logs `qubits` qubits on Q-Comm and returns the state handle.
    pub fn send_qubits(&mut self, from: Party, qubits: usize, event: &str) -> u32 {
        let id = self.next_state;
        self.next_state += 1;
        self.record(
            Channel::QComm,
            Direction::Send { from, to: from.other() },
            Payload::State { id, qubits },
            format!("{event} qubits={qubits}"),
        );
        id
    }

    pub fn local(&mut self, at: Party, bits: &BitString, event: impl Into<String>) {
        self.record(Channel::Local, Direction::At(at), Payload::Bits(bits.clone()), event);
    }

    pub fn begin_phase(&mut self, name: &str) -> Result<(), EngineError> {
        if let Some(active) = &self.active {
            return Err(EngineError::Concurrency { active: active.clone(), requested: name.to_string() });
        }
        self.tick();
        self.active = Some(name.to_string());
        self.record(Channel::Local, Direction::Both, Payload::empty(), format!("phase-begin {name}"));
        Ok(())
    }

    pub fn end_phase(&mut self, name: &str) -> Result<(), EngineError> {
        match &self.active {
            Some(active) if active == name => {
                self.record(Channel::Local, Direction::Both, Payload::empty(), format!("phase-end {name}"));
                self.active = None;
                Ok(())
            }
            other => Err(EngineError::Concurrency {
                active: other.clone().unwrap_or_default(),
                requested: format!("end {name}"),
            }),
        }
    }

    /// Appends a finished sub-transcript, shifting its rounds to start after
    /// the current round.
    pub fn absorb(&mut self, inner: Transcript) -> Result<(), EngineError> {
        if let Some(active) = inner.active {
            return Err(EngineError::Concurrency { active, requested: "absorb".into() });
        }
        let offset = self.round;
        let mut last = self.round;
        for mut e in inner.events {
            e.round += offset;
            if let Payload::State { id, .. } = &mut e.payload {
                *id += self.next_state;
            }
            last = last.max(e.round);
            self.events.push(e);
        }
        self.next_state += inner.next_state;
        self.round = last;
        Ok(())
    }

    pub fn is_well_formed(&self) -> bool {
        self.events.windows(2).all(|w| w[0].round <= w[1].round) && self.active.is_none()
    }

    pub fn rows(&self, trial: u64) -> impl Iterator<Item = TranscriptRow> + '_ {
        self.events.iter().map(move |e| TranscriptRow {
            trial,
            round: e.round,
            channel: e.channel,
            dir: e.dir.to_string(),
            payload_hex: e.payload.to_hex(),
            event: e.event.clone(),
        })
    }

    pub fn write_jsonl<W: Write>(&self, trial: u64, mut out: W) -> std::io::Result<()> {
        for row in self.rows(trial) {
            serde_json::to_writer(&mut out, &row)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self, trial: u64) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(trial, &mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    /// Events whose name starts with `prefix`.
    pub fn find<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Event> + 'a {
        self.events.iter().filter(move |e| e.event.starts_with(prefix))
    }
}
