use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bqs_core::adversary::{self, StrategyOptions};
use bqs_core::bits::BitString;
use bqs_core::bounds::{params_report, SecurityParams, Variant};
use bqs_core::engine::compose::compose_bc_into;
use bqs_core::engine::reductions::{run_bc_with, run_ot_from_rot_with};
use bqs_core::engine::{
    ideal_rot, run_bqs_ot, run_bqs_to, run_reflection, Committer, ComposeConfig, Corruption, EngineError, IdealInput,
    InnerTor, Party, PlayerProgram, ProtocolConfig, RotOutput, Transcript, TranscriptRow,
};
use bqs_core::entropy::{
    load_distribution_csv, verify_chain_rule, verify_monotonicity, verify_splitting, EntropyError,
};
use bqs_core::harness::{map_trials, run_experiment, run_suite, ExperimentConfig, HarnessError, LemmaSuite, Scenario};
use bqs_core::rng::TrialRng;
use bqs_core::trial_rng;
use serde_json::{json, Value};

use crate::{CliError, Common};

pub type Outcome = Result<(Value, bool), CliError>;

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        if e.is_violation() {
            CliError::Violation(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        HarnessError::from(e).into()
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("BQS_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| usage(format!("BQS_SEED: cannot parse {v:?}"))),
        Err(_) => Ok(None),
    }
}

/// Defaults, then `BQS_SEED`, then the config file, then flags.
fn resolve(common: &Common, defaults: &[(&str, &str)]) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    let pairs = |items: &[(&str, String)]| -> BTreeMap<String, String> {
        items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    };
    let owned: Vec<(&str, String)> = defaults.iter().map(|(k, v)| (*k, v.to_string())).collect();
    cfg.apply(&pairs(&owned))?;
    if let Some(seed) = env_seed()? {
        cfg.seed = seed;
    }
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        cfg.apply(&bqs_core::harness::parse_key_values(&text)?)?;
    }
    let mut flags: Vec<(&str, String)> = Vec::new();
    let mut flag = |k: &'static str, v: Option<String>| {
        if let Some(v) = v {
            flags.push((k, v));
        }
    };
    flag("seed", common.seed.map(|v| v.to_string()));
    flag("out", common.out.as_ref().map(|p| p.display().to_string()));
    flag("trials", common.trials.map(|v| v.to_string()));
    flag("n", common.n.map(|v| v.to_string()));
    flag("ell", common.ell.map(|v| v.to_string()));
    flag("m", common.m.map(|v| v.to_string()));
    flag("beta", common.beta.map(|v| v.to_string()));
    flag("eps", common.eps.map(|v| v.to_string()));
    flag("model", common.model.clone());
    flag("max_qubits", common.max_qubits.map(|v| v.to_string()));
    flag("every_round", common.every_round.then(|| "true".to_string()));
    flag("strict_bounds", common.strict.then(|| "true".to_string()));
    cfg.apply(&pairs(&flags))?;
    cfg.validate()?;
    Ok(cfg)
}

fn protocol(cfg: &ExperimentConfig) -> Result<ProtocolConfig, CliError> {
    let pc = cfg.protocol();
    pc.validate()?;
    Ok(pc)
}

fn header(command: &str, cfg: &ExperimentConfig) -> Value {
    let mut resolved = cfg.resolved();
    resolved.remove("out");
    resolved.remove("scenario");
    json!({ "command": command, "config": resolved })
}

fn write_jsonl(path: &Path, header: &Value, rows: impl IntoIterator<Item = TranscriptRow>) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    let line = json!({ "header": header, "schema": ["trial", "round", "channel", "dir", "payload_hex", "event"] });
    writeln!(w, "{line}")?;
    for row in rows {
        writeln!(w, "{}", serde_json::to_string(&row).expect("rows serialize"))?;
    }
    w.flush()?;
    Ok(())
}

fn persist(cfg: &ExperimentConfig, head: &Value, transcripts: &[(u64, Transcript)]) -> Result<(), CliError> {
    if let Some(path) = &cfg.out {
        write_jsonl(path, head, transcripts.iter().flat_map(|(t, tr)| tr.rows(*t)))?;
    }
    Ok(())
}

fn collect<T: Send>(trials: u64, f: impl Fn(u64) -> Result<T, EngineError> + Sync + Send) -> Result<Vec<T>, CliError> {
    map_trials(trials, f).into_iter().map(|r| r.map_err(CliError::from)).collect()
}

fn frac(count: u64, total: u64) -> f64 {
    count as f64 / total as f64
}

fn check_bit(name: &str, v: u8) -> Result<u8, CliError> {
    if v > 1 {
        return Err(usage(format!("--{name} must be 0 or 1")));
    }
    Ok(v)
}

fn parse_committer(s: &str) -> Result<Committer, CliError> {
    match s {
        "honest" => Ok(Committer::Honest),
        "cheat" | "binding-cheat" => Ok(Committer::BindingCheat),
        _ => Err(usage(format!("--committer: expected honest or cheat, got {s:?}"))),
    }
}

fn parse_inner(s: &str) -> Result<bool, CliError> {
    match s {
        "bqs" => Ok(true),
        "ideal" => Ok(false),
        _ => Err(usage(format!("--inner: expected ideal or bqs, got {s:?}"))),
    }
}

fn honest_rot(pc: &ProtocolConfig, reversed: bool, rng: &mut TrialRng) -> Result<(RotOutput, Transcript, bool), EngineError> {
    let run = if reversed {
        run_bqs_to(&PlayerProgram::Honest, &PlayerProgram::Honest, pc, rng)?
    } else {
        run_bqs_ot(&PlayerProgram::Honest, &PlayerProgram::Honest, pc, rng)?
    };
    let s = run.sender_output.expect("honest sender");
    let rot = RotOutput {
        x0: s.s0,
        x1: s.s1,
        c: run.receiver.c.expect("honest receiver"),
        y: run.receiver.y.expect("honest receiver"),
    };
    Ok((rot, run.transcript, run.within_bound))
}

pub fn run_rot(common: &Common) -> Outcome {
    let cfg = resolve(common, &[("trials", "1")])?;
    let pc = protocol(&cfg)?;
    let runs = collect(cfg.trials, |t| {
        let (rot, transcript, within) = honest_rot(&pc, false, &mut trial_rng(cfg.seed, t))?;
        Ok((rot, transcript, within))
    })?;
    let correct = runs.iter().filter(|(r, _, _)| r.x(r.c) == &r.y).count() as u64;
    let first = &runs[0].0;
    let head = header("run-rot", &cfg);
    persist(&cfg, &head, &runs.iter().enumerate().map(|(t, r)| (t as u64, r.1.clone())).collect::<Vec<_>>())?;
    let ok = correct == cfg.trials;
    Ok((
        json!({
            "header": head,
            "trials": cfg.trials,
            "correct": correct,
            "all_correct": ok,
            "within_bound": runs[0].2,
            "max_ell": pc.max_ell()?,
            "first": { "c": first.c, "y": first.y.to_string(), "s0": first.x0.to_string(), "s1": first.x1.to_string() },
        }),
        ok,
    ))
}

fn parse_bits(name: &str, v: &Option<String>) -> Result<Option<BitString>, CliError> {
    v.as_ref().map(|s| s.parse().map_err(|e| usage(format!("--{name}: {e}")))).transpose()
}

pub fn run_ot(common: &Common, x0: Option<String>, x1: Option<String>, c: Option<u8>, inner: &str) -> Outcome {
    let (x0, x1) = (parse_bits("x0", &x0)?, parse_bits("x1", &x1)?);
    let mut defaults = vec![("trials", "1".to_string())];
    if let Some(x) = x0.as_ref().or(x1.as_ref()) {
        defaults.push(("ell", x.len().to_string()));
    }
    let borrowed: Vec<(&str, &str)> = defaults.iter().map(|(k, v)| (*k, v.as_str())).collect();
    let cfg = resolve(common, &borrowed)?;
    if let Some(c) = c {
        check_bit("c", c)?;
    }
    let bqs = parse_inner(inner)?;
    let ell = cfg.params.ell as usize;
    for (name, x) in [("x0", &x0), ("x1", &x1)] {
        if let Some(x) = x {
            if x.len() != ell {
                return Err(usage(format!("--{name} has {} bits but ell = {ell}", x.len())));
            }
        }
    }
    let pc = protocol(&cfg)?;
    let runs = collect(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, t);
        let a0 = x0.clone().unwrap_or_else(|| BitString::random(ell, &mut rng));
        let a1 = x1.clone().unwrap_or_else(|| BitString::random(ell, &mut rng));
        let choice = c.unwrap_or_else(|| BitString::random(1, &mut rng).get(0));
        let (rot, transcript) = if bqs {
            let (rot, transcript, _) = honest_rot(&pc, false, &mut rng)?;
            (rot, Some(transcript))
        } else {
            (ideal_rot(ell, Party::A, Corruption::None, &IdealInput::None, &mut rng)?, None)
        };
        let run = run_ot_from_rot_with(&a0, &a1, choice, rot, transcript)?;
        let expected = if choice == 0 { a0.clone() } else { a1.clone() };
        Ok((a0, a1, choice, run, expected))
    })?;
    let correct = runs.iter().filter(|r| r.3.y == r.4).count() as u64;
    let head = header("run-ot", &cfg);
    persist(&cfg, &head, &runs.iter().enumerate().map(|(t, r)| (t as u64, r.3.transcript.clone())).collect::<Vec<_>>())?;
    let (a0, a1, choice, run, _) = &runs[0];
    let ok = correct == cfg.trials;
    Ok((
        json!({
            "header": head,
            "inner": inner,
            "trials": cfg.trials,
            "correct": correct,
            "first": {
                "x0": a0.to_string(), "x1": a1.to_string(), "c": choice,
                "d": run.messages.d, "y": run.y.to_string(),
            },
        }),
        ok,
    ))
}

pub fn run_bc(common: &Common, b: u8, a: u8, committer: &str, inner: &str) -> Outcome {
    let (b, a) = (check_bit("b", b)?, check_bit("a", a)?);
    let committer = parse_committer(committer)?;
    let bqs = parse_inner(inner)?;
    let cfg = resolve(common, &[("trials", "1")])?;
    let pc = protocol(&cfg)?;
    let ell = pc.ell;
    let runs = collect(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, t);
        let (tor, transcript) = if bqs {
            let (tor, transcript, _) = honest_rot(&pc, true, &mut rng)?;
            (tor, Some(transcript))
        } else {
            (ideal_rot(ell, Party::B, Corruption::None, &IdealInput::None, &mut rng)?, None)
        };
        run_bc_with(b, a, committer, tor, transcript, &mut rng)
    })?;
    let head = header("run-bc", &cfg);
    persist(&cfg, &head, &runs.iter().enumerate().map(|(t, r)| (t as u64, r.transcript.clone())).collect::<Vec<_>>())?;
    let accepted_b = runs.iter().filter(|r| r.verifier_output == Some(b)).count() as u64;
    let cheats = runs.iter().filter(|r| r.cheat_success == Some(true)).count() as u64;
    let honest_ok = committer != Committer::Honest || a == 0 || accepted_b == cfg.trials;
    let mut summary = json!({
        "header": head,
        "b": b,
        "a": a,
        "inner": inner,
        "committer": committer,
        "trials": cfg.trials,
        "verifier_output_b": accepted_b,
        "first": &runs[0],
    });
    if committer == Committer::BindingCheat {
        summary["cheat_success"] = json!(cheats);
        summary["cheat_frequency"] = json!(frac(cheats, cfg.trials));
        summary["expected"] = json!((-(ell as f64)).exp2());
    }
    Ok((summary, honest_ok))
}

pub fn compose(common: &Common, b: u8, a: u8, committer: &str, inner: &str) -> Outcome {
    let (b, a) = (check_bit("b", b)?, check_bit("a", a)?);
    let committer = parse_committer(committer)?;
    let bqs = parse_inner(inner)?;
    let mut cfg = resolve(common, &[("trials", "1"), ("n", "64"), ("eps", "0.0625")])?;
    let budget = bqs_core::bounds::composed_bc_error(cfg.params.eps).map_err(|e| usage(e.to_string()))?;
    if common.ell.is_none() {
        cfg.params.ell = budget.ell;
    }
    let pc = protocol(&cfg)?;
    let cc = ComposeConfig {
        ell: pc.ell,
        eps: pc.eps,
        inner: if bqs { InnerTor::BqsTo(pc.clone()) } else { InnerTor::Ideal },
        committer,
    };
    let runs = collect(cfg.trials, |t| {
        let mut transcript = Transcript::new();
        let run = compose_bc_into(&mut transcript, b, a, &cc, &mut trial_rng(cfg.seed, t))?;
        Ok((run, transcript))
    })?;
    let head = header("compose-bc", &cfg);
    persist(&cfg, &head, &runs.iter().enumerate().map(|(t, r)| (t as u64, r.1.clone())).collect::<Vec<_>>())?;
    let correct = runs.iter().filter(|r| r.0.verifier_output == (a == 1).then_some(b)).count() as u64;
    let cheats = runs.iter().filter(|r| r.0.cheat_success == Some(true)).count() as u64;
    let ok = committer != Committer::Honest || correct == cfg.trials;
    let first = &runs[0].0;
    Ok((
        json!({
            "header": head,
            "trials": cfg.trials,
            "correct": correct,
            "cheat_success": (committer == Committer::BindingCheat).then_some(cheats),
            "error_budget": first.error_budget,
            "ell_matches_eps": first.ell_matches_eps,
            "phases": first.phases,
            "simulator_memory": first.simulator_memory,
            "inner_within_bound": first.inner_within_bound,
            "first": first,
        }),
        ok,
    ))
}

pub fn attack(common: &Common, name: &str, c: Option<u8>) -> Outcome {
    if let Some(c) = c {
        check_bit("c", c)?;
    }
    let cfg = resolve(common, &[("trials", "100"), ("n", "8"), ("ell", "2")])?;
    let pc = protocol(&cfg)?;
    let opts = StrategyOptions { n: pc.n, m: pc.m, model: pc.model, beta: pc.beta, max_qubits: pc.max_qubits, c };
    let head = header("attack", &cfg);
    let trials = cfg.trials;
    match name {
        "reflection" => {
            let runs = collect(trials, |t| run_reflection(&pc, true, &mut trial_rng(cfg.seed, t)))?;
            persist(
                &cfg,
                &head,
                &runs
                    .iter()
                    .enumerate()
                    .flat_map(|(t, r)| r.transcripts.iter().map(move |tr| (t as u64, tr.clone())))
                    .collect::<Vec<_>>(),
            )?;
            let hits = runs.iter().filter(|r| r.y_in_first_pair).count() as u64;
            let first = &runs[0];
            Ok((
                json!({
                    "header": head,
                    "attack": name,
                    "trials": trials,
                    "y_in_first_pair": hits,
                    "frequency": frac(hits, trials),
                    "bob_max_qubits": runs.iter().map(|r| r.bob_qubits).max(),
                    "first": {
                        "x0": first.first.s0.to_string(), "x1": first.first.s1.to_string(),
                        "c": first.second_c, "y": first.second_y.to_string(),
                    },
                }),
                true,
            ))
        }
        "binding" => {
            let runs = collect(trials, |t| {
                bqs_core::engine::run_bc(0, 1, pc.ell, Committer::BindingCheat, &mut trial_rng(cfg.seed, t))
            })?;
            persist(&cfg, &head, &runs.iter().enumerate().map(|(t, r)| (t as u64, r.transcript.clone())).collect::<Vec<_>>())?;
            let wins = runs.iter().filter(|r| r.cheat_success == Some(true)).count() as u64;
            Ok((
                json!({
                    "header": head,
                    "attack": name,
                    "trials": trials,
                    "cheat_success": wins,
                    "frequency": frac(wins, trials),
                    "expected": (-(pc.ell as f64)).exp2(),
                }),
                true,
            ))
        }
        _ => {
            let strategy = adversary::named(name, &opts).map_err(|e| match e {
                adversary::AdversaryError::Unknown(_) => usage(format!(
                    "unknown attack {name:?}; expected one of {}",
                    adversary::STRATEGY_NAMES.join(", ")
                )),
                other => CliError::from(EngineError::from(other)),
            })?;
            let program = PlayerProgram::Adversary(strategy.clone());
            let runs = collect(trials, |t| {
                run_bqs_ot(&PlayerProgram::Honest, &program, &pc, &mut trial_rng(cfg.seed, t))
            })?;
            persist(&cfg, &head, &runs.iter().enumerate().map(|(t, r)| (t as u64, r.transcript.clone())).collect::<Vec<_>>())?;
            let mut knows = [0u64; 2];
            let mut both = 0u64;
            for r in &runs {
                let s = r.sender_output.as_ref().expect("honest sender");
                let k = match (&r.receiver.guesses, r.receiver.c, &r.receiver.y) {
                    (Some(g), _, _) => [g[0] == s.s0, g[1] == s.s1],
                    (None, Some(c), Some(y)) => [c == 0 && y == &s.s0, c == 1 && y == &s.s1],
                    _ => [false, false],
                };
                knows[0] += k[0] as u64;
                knows[1] += k[1] as u64;
                both += (k[0] && k[1]) as u64;
            }
            Ok((
                json!({
                    "header": head,
                    "attack": name,
                    "model": pc.model,
                    "memory_bound": strategy.memory_bound,
                    "trials": trials,
                    "knows_s0": knows[0],
                    "knows_s1": knows[1],
                    "knows_both": both,
                    "both_frequency": frac(both, trials),
                    "max_qubits_held": runs.iter().map(|r| r.receiver.max_qubits_held).max(),
                    "environment_qubits": runs.iter().map(|r| r.receiver.environment_qubits).max(),
                    "within_bound": runs[0].within_bound,
                }),
                true,
            ))
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn params(n: u64, ell: u64, m: u64, beta: f64, eps: f64, q: u64, lambda: Option<f64>, s: u64, variant: &str) -> Outcome {
    let variant: Variant = variant.parse().map_err(|e: bqs_core::bounds::BoundsError| usage(e.to_string()))?;
    let p = SecurityParams { n, ell, m, beta, eps, q, lambda, s };
    let report = params_report(&p).map_err(|e| usage(e.to_string()))?;
    let selected = report.variants.iter().find(|v| v.variant == variant).expect("all variants reported");
    let max_ell = selected.max_ell;
    let mut out = serde_json::to_value(&report).expect("report serializes");
    out["variant"] = json!(variant);
    out["max_ell"] = json!(max_ell);
    out["feasible"] = json!(max_ell >= 1);
    Ok((out, max_ell >= 1))
}

fn table_check(suite: LemmaSuite, path: &PathBuf, eps: f64, eps2: f64, beta: f64) -> Outcome {
    let d = load_distribution_csv(path)?;
    let report = match suite {
        LemmaSuite::Splitting => verify_splitting(&d, eps, None, beta)?.0,
        LemmaSuite::Chain => verify_chain_rule(&d, &["X"], &["Y"], &["Z"], eps, eps2)?,
        LemmaSuite::Monotonicity => verify_monotonicity(&d, &["X"], &["Y"], &["Z"], eps)?,
        other => return Err(usage(format!("--table works with splitting, chain or monotonicity, not {other}"))),
    };
    let holds = report.holds;
    Ok((json!({ "suite": suite, "table": path.display().to_string(), "report": report }), holds))
}

pub fn verify_lemmas(
    suite: &str,
    cases: u64,
    seed: Option<u64>,
    table: Option<PathBuf>,
    eps: f64,
    eps2: f64,
    beta: f64,
) -> Outcome {
    let seed = match seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let suites: Vec<LemmaSuite> = if suite == "all" { LemmaSuite::ALL.to_vec() } else { vec![suite.parse()?] };
    if let Some(path) = table {
        if suites.len() != 1 {
            return Err(usage("--table needs a single --suite"));
        }
        return table_check(suites[0], &path, eps, eps2, beta);
    }
    let reports = suites.iter().map(|&s| run_suite(s, cases, seed)).collect::<Result<Vec<_>, _>>()?;
    let violations: u64 = reports.iter().map(|r| r.violations).sum();
    Ok((json!({ "seed": seed, "cases": cases, "violations": violations, "suites": reports }), violations == 0))
}

pub fn distinguish(common: &Common, scenario: Option<String>) -> Outcome {
    let mut cfg = resolve(common, &[])?;
    if let Some(s) = scenario {
        cfg.scenario = s.parse::<Scenario>()?;
    }
    let out = run_experiment(&cfg)?;
    let mut resolved = cfg.resolved();
    resolved.remove("out");
    Ok((json!({ "config": resolved, "report": out.report, "within_radius": out.report.within_radius() }), true))
}
