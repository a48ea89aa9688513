//! Real-vs-ideal experiments.
//!
//! Each scenario maps one trial of either world to an observable: a string
//! built from the classical inputs and outputs the environment sees. The
//! report compares the two histograms.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::config::{ExperimentConfig, Scenario};
use super::stats::{dkw_radius, histogram_tv, union_radius};
use super::{map_trials, HarnessError};
use crate::adversary::{self, AdversaryStrategy, BasisRule};
use crate::bits::BasisString;
use crate::engine::simulators::{sender_simulation_exact, MAX_EXACT_SENDER_QUBITS};
use crate::engine::{
    ideal_rot, run_bqs_ot, run_reflection, simulate_sender, Channel, Corruption, EngineError, IdealInput, Party,
    PlayerProgram, ProtocolConfig, ReceiverOutput, ReceiverSimulator, SenderOutput, Transcript, TranscriptRow,
    DEFAULT_SUPPORT_BUDGET,
};
use crate::hashpa::sample_hash_seed;
use crate::qstate::Qubit;
use crate::rng::trial_rng;

/// Stream reserved for scenario setup (the corrupt sender's fixed program).
const SETUP_STREAM: u64 = u64::MAX;
/// Seed pairs enumerated for the exact sender-simulation distance.
const EXACT_SEED_PAIRS: u64 = 16;

#[derive(Clone, Debug, Serialize)]
pub struct DistinguishReport {
    pub scenario: Scenario,
    pub trials: u64,
    /// What each cell key encodes.
    pub observable: &'static str,
    /// Empirical TV between the real and ideal histograms.
    pub tv: f64,
    /// Two-sample radius: twice the Hoeffding-plus-union-bound radius of
    /// each side at `δ/2`.
    pub radius: f64,
    /// `sqrt(ln(2/δ)/(2N))`, for reference.
    pub dkw_radius: f64,
    pub delta: f64,
    /// Alphabet size used for the radius.
    pub alphabet: usize,
    /// Exact distance where the scenario can enumerate it.
    pub exact_tv: Option<f64>,
    /// Distance expected from the construction, when known in closed form.
    pub expected_tv: Option<f64>,
    /// `[real, ideal]` counts per observable value.
    pub cells: BTreeMap<String, [u64; 2]>,
}

impl DistinguishReport {
    pub fn within_radius(&self) -> bool {
        self.tv <= self.radius
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub report: DistinguishReport,
    /// Header line followed by the rows of every trial, newline-terminated.
    pub jsonl: String,
}

/// Per-scenario state shared by all trials.
enum Setup {
    HonestRot,
    SenderCorrupt(AdversaryStrategy),
    Receiver { strategy: AdversaryStrategy, simulator: ReceiverSimulator },
    Reflection,
}

struct Trial {
    real: String,
    ideal: String,
    rows: Vec<TranscriptRow>,
}

fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> Qubit {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Qubit { amp: [C64::new(theta.cos(), 0.0), C64::from_polar(theta.sin(), phi)] }
}

/// A sender transmitting arbitrary single-qubit states and announcing
/// bases unrelated to them, fixed by the experiment seed.
pub fn corrupt_sender(n: usize, seed: u64) -> Result<AdversaryStrategy, HarnessError> {
    let mut rng = trial_rng(seed, SETUP_STREAM);
    let qubits = (0..n).map(|_| random_qubit(&mut rng)).collect();
    let announce = BasisString::random(n, &mut rng);
    Ok(adversary::product_sender(qubits, announce).map_err(EngineError::from)?)
}

fn receiver_strategy(cfg: &ExperimentConfig, pc: &ProtocolConfig) -> Result<AdversaryStrategy, EngineError> {
    Ok(match cfg.scenario {
        Scenario::ReceiverMeasure => adversary::full_measurement_receiver(BasisRule::PerQubit)?,
        Scenario::Storing => adversary::storing_receiver(pc.m, pc.max_qubits)?,
        Scenario::EprTeleport => adversary::epr_teleport_receiver(pc.n, pc.model, pc.beta)?,
        other => unreachable!("{other} is not a receiver scenario"),
    })
}

fn setup(cfg: &ExperimentConfig, pc: &ProtocolConfig) -> Result<Setup, HarnessError> {
    Ok(match cfg.scenario {
        Scenario::HonestRot => Setup::HonestRot,
        Scenario::SenderCorrupt => Setup::SenderCorrupt(corrupt_sender(pc.n, cfg.seed)?),
        Scenario::ReceiverMeasure | Scenario::Storing | Scenario::EprTeleport => {
            let strategy = receiver_strategy(cfg, pc)?;
            let simulator = ReceiverSimulator::new(&strategy, pc, DEFAULT_SUPPORT_BUDGET).map_err(|e| match e {
                EngineError::Budget { support, budget } => HarnessError::ScenarioMismatch {
                    scenario: cfg.scenario.to_string(),
                    reason: format!("{support} support entries exceed the simulator budget {budget}; lower n"),
                },
                other => other.into(),
            })?;
            Setup::Receiver { strategy, simulator }
        }
        Scenario::Reflection => Setup::Reflection,
    })
}

fn alphabet(scenario: Scenario, ell: usize) -> usize {
    let l = ell as u32;
    match scenario {
        Scenario::HonestRot => 1 << (2 * l + 1),
        Scenario::SenderCorrupt => 1 << (l + 1),
        Scenario::ReceiverMeasure | Scenario::Storing | Scenario::EprTeleport => 1 << (2 * l + 2),
        Scenario::Reflection => 2,
    }
}

fn observable_name(scenario: Scenario) -> &'static str {
    match scenario {
        Scenario::HonestRot => "c|y|s0|s1",
        Scenario::SenderCorrupt => "receiver c|y",
        Scenario::ReceiverMeasure | Scenario::Storing | Scenario::EprTeleport => {
            "s0|s1|adversary knows s0|adversary knows s1"
        }
        Scenario::Reflection => "alice's y in her own pair (real: attack, ideal: honest control)",
    }
}

/// Which sender strings the receiver's output pins down exactly.
fn knows(out: &ReceiverOutput, s: &SenderOutput) -> [bool; 2] {
    match (&out.guesses, out.c, &out.y) {
        (Some(g), _, _) => [g[0] == s.s0, g[1] == s.s1],
        (None, Some(c), Some(y)) => [c == 0 && *y == s.s0, c == 1 && *y == s.s1],
        _ => [false, false],
    }
}

fn receiver_key(s: &SenderOutput, k: [bool; 2]) -> String {
    format!("{}|{}|{}|{}", s.s0, s.s1, k[0] as u8, k[1] as u8)
}

fn observable_row(trial: u64, round: u32, side: &str, value: &str) -> TranscriptRow {
    TranscriptRow {
        trial,
        round,
        channel: Channel::Local,
        dir: "*".into(),
        payload_hex: String::new(),
        event: format!("observable {side}={value}"),
    }
}

fn finish(trial: u64, real: String, ideal: String, transcripts: &[&Transcript]) -> Trial {
    let mut rows: Vec<TranscriptRow> = transcripts.iter().flat_map(|t| t.rows(trial)).collect();
    let round = transcripts.iter().map(|t| t.round()).max().unwrap_or(0) + 1;
    rows.push(observable_row(trial, round, "real", &real));
    rows.push(observable_row(trial, round, "ideal", &ideal));
    Trial { real, ideal, rows }
}

fn run_trial(setup: &Setup, pc: &ProtocolConfig, seed: u64, trial: u64) -> Result<Trial, EngineError> {
    let mut real_rng = trial_rng(seed, 2 * trial);
    let mut ideal_rng = trial_rng(seed, 2 * trial + 1);
    Ok(match setup {
        Setup::HonestRot => {
            let run = run_bqs_ot(&PlayerProgram::Honest, &PlayerProgram::Honest, pc, &mut real_rng)?;
            let s = run.sender_output.as_ref().expect("honest sender");
            let (c, y) = (run.receiver.c.expect("honest receiver"), run.receiver.y.clone().expect("honest receiver"));
            let real = format!("{c}|{y}|{}|{}", s.s0, s.s1);
            let rot = ideal_rot(pc.ell, Party::A, Corruption::None, &IdealInput::None, &mut ideal_rng)?;
            let ideal = format!("{}|{}|{}|{}", rot.c, rot.y, rot.x0, rot.x1);
            finish(trial, real, ideal, &[&run.transcript])
        }
        Setup::SenderCorrupt(strategy) => {
            let program = PlayerProgram::Adversary(strategy.clone());
            let run = run_bqs_ot(&program, &PlayerProgram::Honest, pc, &mut real_rng)?;
            let real = format!("{}|{}", run.receiver.c.expect("honest receiver"), run.receiver.y.clone().expect("honest receiver"));
            let sim = simulate_sender(strategy, pc, &mut ideal_rng)?;
            let ideal = format!("{}|{}", sim.receiver_c, sim.receiver_y);
            finish(trial, real, ideal, &[&run.transcript])
        }
        Setup::Receiver { strategy, simulator } => {
            let program = PlayerProgram::Adversary(strategy.clone());
            let run = run_bqs_ot(&PlayerProgram::Honest, &program, pc, &mut real_rng)?;
            let s = run.sender_output.as_ref().expect("honest sender");
            let real = receiver_key(s, knows(&run.receiver, s));
            let sim = simulator.simulate(strategy, pc, &mut ideal_rng)?;
            let ideal = receiver_key(&sim.ideal_sender, knows(&sim.adversary, &sim.ideal_sender));
            finish(trial, real, ideal, &[&run.transcript])
        }
        Setup::Reflection => {
            let attack = run_reflection(pc, true, &mut real_rng)?;
            let control = run_reflection(pc, false, &mut ideal_rng)?;
            let real = (attack.y_in_first_pair as u8).to_string();
            let ideal = (control.y_in_first_pair as u8).to_string();
            finish(trial, real, ideal, &[&attack.transcripts[0], &attack.transcripts[1]])
        }
    })
}

/// Largest exact distance over a few seed pairs drawn from the setup stream.
fn sender_exact_tv(strategy: &AdversaryStrategy, pc: &ProtocolConfig, seed: u64) -> Result<Option<f64>, EngineError> {
    if pc.n > MAX_EXACT_SENDER_QUBITS {
        return Ok(None);
    }
    let mut rng = trial_rng(seed, SETUP_STREAM - 1);
    let mut worst: f64 = 0.0;
    for _ in 0..EXACT_SEED_PAIRS {
        let r0 = sample_hash_seed(pc.n, pc.ell, &mut rng)?;
        let r1 = sample_hash_seed(pc.n, pc.ell, &mut rng)?;
        worst = worst.max(sender_simulation_exact(strategy, pc.ell, &r0, &r1)?.tv);
    }
    Ok(Some(worst))
}

fn expected_tv(cfg: &ExperimentConfig, pc: &ProtocolConfig) -> Option<f64> {
    let miss = (-(pc.ell as f64)).exp2();
    match cfg.scenario {
        Scenario::HonestRot | Scenario::SenderCorrupt => Some(0.0),
        // The adversary knows both strings; the simulated world re-randomizes
        // one of them, which the adversary still matches with probability 2^-ℓ.
        Scenario::EprTeleport => Some(1.0 - miss),
        _ => None,
    }
}

/// Runs `cfg.trials` trials of both worlds. Nothing is written to disk.
pub fn run_experiment_to(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    cfg.validate()?;
    let pc = cfg.protocol();
    pc.validate()?;
    let setup = setup(cfg, &pc)?;
    let trials = map_trials(cfg.trials, |t| run_trial(&setup, &pc, cfg.seed, t));
    let mut header = cfg.resolved();
    header.remove("out");
    let mut jsonl = serde_json::to_string(&json!({
        "header": header,
        "schema": ["trial", "round", "channel", "dir", "payload_hex", "event"],
    }))?;
    jsonl.push('\n');
    let mut real = BTreeMap::new();
    let mut ideal = BTreeMap::new();
    let mut cells: BTreeMap<String, [u64; 2]> = BTreeMap::new();
    for trial in trials {
        let trial = trial?;
        for row in &trial.rows {
            jsonl.push_str(&serde_json::to_string(row)?);
            jsonl.push('\n');
        }
        *real.entry(trial.real.clone()).or_insert(0u64) += 1;
        *ideal.entry(trial.ideal.clone()).or_insert(0u64) += 1;
        cells.entry(trial.real).or_insert([0, 0])[0] += 1;
        cells.entry(trial.ideal).or_insert([0, 0])[1] += 1;
    }
    let exact_tv = match &setup {
        Setup::SenderCorrupt(strategy) => sender_exact_tv(strategy, &pc, cfg.seed)?,
        _ => None,
    };
    let k = alphabet(cfg.scenario, pc.ell).max(cells.len());
    let report = DistinguishReport {
        scenario: cfg.scenario,
        trials: cfg.trials,
        observable: observable_name(cfg.scenario),
        tv: histogram_tv(&real, &ideal),
        radius: 2.0 * union_radius(cfg.trials, k, cfg.delta / 2.0),
        dkw_radius: dkw_radius(cfg.trials, cfg.delta),
        delta: cfg.delta,
        alphabet: k,
        exact_tv,
        expected_tv: expected_tv(cfg, &pc),
        cells,
    };
    Ok(ExperimentOutput { report, jsonl })
}

/// [`run_experiment_to`], persisting the JSONL to `cfg.out` when set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let out = run_experiment_to(cfg)?;
    if let Some(path) = &cfg.out {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(out.jsonl.as_bytes())?;
        w.flush()?;
    }
    Ok(out)
}

