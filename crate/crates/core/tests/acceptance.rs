//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bqs_core::adversary::{epr_teleport_receiver, Model};
use bqs_core::bits::{Basis, BitString};
use bqs_core::bounds::{composed_bc_error, max_ell, uncertainty_bound, uncertainty_threshold, Variant};
use bqs_core::engine::reductions::{
    bc_commit_distribution, bc_verifier_corruption_exact, ot_from_rot_messages, ot_receiver_corruption_exact,
    ot_sender_corruption_exact,
};
use bqs_core::engine::{
    compose_bc, run_bc, run_bqs_ot, run_reflection, Committer, ComposeConfig, PlayerProgram, ProtocolConfig, RotOutput,
};
use bqs_core::harness::{map_trials, run_suite, LemmaSuite, SuiteReport};
use bqs_core::hashpa::collision_probability_exhaustive;
use bqs_core::qstate::Qubit;
use bqs_core::trial_rng;
use rand::Rng;

type Verdict = Result<String, String>;
type Criterion = fn() -> Verdict;
type SenderAdversary<'a> = Box<dyn Fn(&BitString, &BitString, u8) -> (BitString, BitString) + 'a>;
type ReceiverAdversary = Box<dyn Fn(u8, &BitString) -> u8>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64()))
}

fn all_strings(len: usize) -> Vec<BitString> {
    (0..1u64 << len).map(|v| BitString::from_u64(v, len)).collect()
}

fn suite(s: LemmaSuite, cases: u64, seed: u64) -> Result<SuiteReport, String> {
    let r = run_suite(s, cases, seed).map_err(|e| e.to_string())?;
    ensure(r.cases == cases && r.passed(), || format!("{s}: {} violations, first {:?}", r.violations, r.failures.first()))?;
    Ok(r)
}

fn honest_correctness() -> Verdict {
    let start = Instant::now();
    let cfg = ProtocolConfig::new(64, 4);
    let correct = map_trials(10_000, |t| {
        let run = run_bqs_ot(&PlayerProgram::Honest, &PlayerProgram::Honest, &cfg, &mut trial_rng(101, t))?;
        let s = run.sender_output.expect("honest sender");
        Ok::<_, bqs_core::engine::EngineError>(run.receiver.y.as_ref() == Some(s.s(run.receiver.c.expect("honest"))))
    })
    .into_iter()
    .collect::<Result<Vec<bool>, _>>()
    .map_err(|e| e.to_string())?
    .into_iter()
    .filter(|&ok| ok)
    .count();
    let elapsed = start.elapsed();
    ensure(correct == 10_000, || format!("{correct}/10000 correct"))?;
    within(elapsed, 10.0)?;
    Ok(format!("10000/10000 y = s_c at n=64, l=4 in {:.2}s", elapsed.as_secs_f64()))
}

fn bb84_statistics() -> Verdict {
    const SAMPLES: u64 = 20_000;
    let mut rng = trial_rng(102, 0);
    let (mut matched, mut mismatched) = (0u64, 0u64);
    for _ in 0..SAMPLES {
        let bit = rng.gen_range(0..2u8);
        let basis = Basis::from_bit(rng.gen_range(0..2u8));
        matched += (Qubit::bb84(bit, basis).measure(basis, &mut rng) == bit) as u64;
        mismatched += (Qubit::bb84(bit, basis).measure(basis.flip(), &mut rng) == bit) as u64;
    }
    let f = mismatched as f64 / SAMPLES as f64;
    ensure(matched == SAMPLES, || format!("matching bases agreed {matched}/{SAMPLES}"))?;
    ensure((f - 0.5).abs() <= 0.015, || format!("mismatched agreement {f}"))?;
    Ok(format!("matching 1.0, mismatched {f:.4} over {SAMPLES} samples"))
}

fn two_universality() -> Verdict {
    let strings = all_strings(4);
    let mut pairs = 0;
    for (i, a) in strings.iter().enumerate() {
        for b in &strings[i + 1..] {
            let p = collision_probability_exhaustive(4, 2, a, b).map_err(|e| e.to_string())?;
            ensure(p == 0.25, || format!("collision probability {p} for {a}, {b}"))?;
            pairs += 1;
        }
    }
    Ok(format!("all {pairs} distinct pairs collide with probability exactly 1/4"))
}

fn privacy_amplification() -> Verdict {
    let start = Instant::now();
    let r = suite(LemmaSuite::Pa, 200, 104)?;
    let elapsed = start.elapsed();
    within(elapsed, 60.0)?;
    Ok(format!("200 instances, 0 violations, min slack {:.3e}, {:.2}s", r.min_slack.unwrap_or(0.0), elapsed.as_secs_f64()))
}

fn splitting() -> Verdict {
    let r = suite(LemmaSuite::Splitting, 1000, 105)?;
    Ok(format!("1000 instances, 0 violations ({} with alpha <= beta)", r.vacuous))
}

fn chain_and_monotonicity() -> Verdict {
    let chain = suite(LemmaSuite::Chain, 1000, 106)?;
    let mono = suite(LemmaSuite::Monotonicity, 1000, 106)?;
    Ok(format!("chain 1000 (vacuous {}), monotonicity 1000, 0 violations", chain.vacuous + mono.vacuous))
}

/// Largest `l` with `8000·n²·L ≤ (n − 12L − 4 − 8l)³`, in integers.
fn max_ell_u128(n: u128, big_l: u128) -> u64 {
    let fits = |ell: u128| n >= 12 * big_l + 4 + 8 * ell && 8000 * n * n * big_l <= (n - 12 * big_l - 4 - 8 * ell).pow(3);
    (0..=n as u64).take_while(|&l| fits(l as u128)).last().unwrap_or(0)
}

fn bounds() -> Verdict {
    let mut rng = trial_rng(107, 0);
    let bound = |n: u64, eps: f64| uncertainty_bound(n, eps).map_err(|e| e.to_string());
    for _ in 0..20 {
        let k = rng.gen_range(1..=64i32);
        let eps = (-k as f64).exp2();
        let t = 8000 * k as u64;
        ensure(uncertainty_threshold(eps).map_err(|e| e.to_string())? == t as f64, || format!("threshold at 2^-{k}"))?;
        ensure(bound(t, eps)? == 0.0, || format!("bound({t}, 2^-{k}) = {}", bound(t, eps).unwrap_or(f64::NAN)))?;
        ensure(bound(t - 1, eps)? < 0.0 && bound(t + 1, eps)? > 0.0, || format!("no sign change at 2^-{k}"))?;
        let u: f64 = rng.gen_range(1.0..60.0);
        let eps = (-u).exp2();
        let t = uncertainty_threshold(eps).map_err(|e| e.to_string())?;
        let below = t.floor() as u64;
        ensure(bound(below, eps)? <= 0.0 && bound(below + 1, eps)? >= 0.0, || format!("no sign change at 2^-{u}"))?;
    }
    let oracle = max_ell_u128(1_000_000, 30);
    let got = max_ell(1_000_000, 0, 0.0, (-30f64).exp2(), Variant::Main).map_err(|e| e.to_string())?;
    ensure(got == oracle, || format!("max_ell {got}, integer oracle {oracle}"))?;
    let aux = suite(LemmaSuite::Aux, 10_000, 0)?;
    Ok(format!(
        "zero crossing exact for 20 dyadic and 20 real eps; max_ell = {got} = oracle; aux grid 10^4 min slack {:.3e}",
        aux.min_slack.unwrap_or(0.0)
    ))
}

fn epr_teleport() -> Verdict {
    let strategy = epr_teleport_receiver(8, Model::Legacy, 0.0).map_err(|e| e.to_string())?;
    let program = PlayerProgram::Adversary(strategy);
    let legacy = ProtocolConfig { model: Model::Legacy, ..ProtocolConfig::new(8, 2) };
    let both = map_trials(1000, |t| {
        let run = run_bqs_ot(&PlayerProgram::Honest, &program, &legacy, &mut trial_rng(108, t)).map_err(|e| e.to_string())?;
        let s = run.sender_output.expect("honest sender");
        Ok::<_, String>(matches!(&run.receiver.guesses, Some([g0, g1]) if *g0 == s.s0 && *g1 == s.s1))
    })
    .into_iter()
    .collect::<Result<Vec<bool>, _>>()?
    .into_iter()
    .filter(|&b| b)
    .count();
    ensure(both == 1000, || format!("both strings learned in {both}/1000"))?;
    ensure(epr_teleport_receiver(8, Model::Refined, 0.0).is_err(), || "refined model admitted the strategy".into())?;
    let refined = ProtocolConfig::new(8, 2);
    match run_bqs_ot(&PlayerProgram::Honest, &program, &refined, &mut trial_rng(108, 0)) {
        Err(e) if e.is_violation() => {}
        Err(e) => return Err(format!("refined run failed without a violation: {e}")),
        Ok(_) => return Err("refined run accepted the strategy".into()),
    }
    Ok("legacy: both strings in 1000/1000; refined: strategy rejected".into())
}

fn reflection() -> Verdict {
    let cfg = ProtocolConfig::new(32, 4);
    let runs = map_trials(1000, |t| run_reflection(&cfg, true, &mut trial_rng(109, t)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let hits = runs.iter().filter(|r| r.y_in_first_pair).count();
    let qubits = runs.iter().map(|r| r.bob_qubits).max().unwrap_or(0);
    ensure(hits == 1000, || format!("y in first pair {hits}/1000"))?;
    ensure(qubits == 0, || format!("attacker held {qubits} qubits"))?;
    Ok("y in {x0, x1} of the paired run in 1000/1000 with 0 stored qubits".into())
}

fn bc_binding() -> Verdict {
    const N: u64 = 100_000;
    let wins = map_trials(N, |t| run_bc(0, 1, 4, Committer::BindingCheat, &mut trial_rng(110, t)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?
        .iter()
        .filter(|r| r.cheat_success == Some(true))
        .count();
    let p = 1.0 / 16.0;
    let f = wins as f64 / N as f64;
    let tol = 3.0 * (p * (1.0 - p) / N as f64).sqrt();
    ensure((f - p).abs() <= tol, || format!("cheat frequency {f}, expected {p} +- {tol:.5}"))?;
    Ok(format!("cheat frequency {f:.5} within {p} +- {tol:.5}"))
}

fn bc_hiding() -> Verdict {
    let d0 = bc_commit_distribution(0).map_err(|e| e.to_string())?;
    let d1 = bc_commit_distribution(1).map_err(|e| e.to_string())?;
    ensure(d0 == d1, || format!("{d0:?} vs {d1:?}"))?;
    for b in 0..2 {
        let cmp = bc_verifier_corruption_exact(2, b).map_err(|e| e.to_string())?;
        ensure(cmp.identical(), || format!("verifier view differs for b={b}"))?;
    }
    Ok(format!("commit message distribution {d0:?} for both bits; verifier simulation exact"))
}

fn ot_from_rot() -> Verdict {
    let strings = all_strings(2);
    let mut checked = 0u64;
    for x0 in &strings {
        for x1 in &strings {
            for c in 0..2u8 {
                for r0 in &strings {
                    for r1 in &strings {
                        for rc in 0..2u8 {
                            let y = if rc == 0 { r0.clone() } else { r1.clone() };
                            let rot = RotOutput { x0: r0.clone(), x1: r1.clone(), c: rc, y };
                            let msgs = ot_from_rot_messages(x0, x1, c, &rot).map_err(|e| e.to_string())?;
                            let want = if c == 0 { x0 } else { x1 };
                            ensure(&msgs.y == want, || format!("x0={x0} x1={x1} c={c} rot={rot:?}"))?;
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    let zero = BitString::zeros(2);
    let senders: Vec<(&str, SenderAdversary<'_>)> = vec![
        ("passthrough", Box::new(|a, b, d| if d == 0 { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) })),
        ("constant", Box::new(|_, _, _| (BitString::from_u64(1, 2), BitString::from_u64(2, 2)))),
        ("swap-on-d", Box::new(|a, b, d| if d == 1 { (a.clone(), b.clone()) } else { (zero.clone(), a.xor(b).expect("same length")) })),
    ];
    for (name, s) in &senders {
        for c in 0..2u8 {
            let cmp = ot_sender_corruption_exact(2, c, s.as_ref()).map_err(|e| e.to_string())?;
            ensure(cmp.identical(), || format!("sender strategy {name}, c={c}: tv {}", cmp.tv()))?;
        }
    }
    let receivers: Vec<(&str, ReceiverAdversary)> = vec![
        ("zero", Box::new(|_, _| 0)),
        ("echo-choice", Box::new(|c, _| c)),
        ("first-bit", Box::new(|_, y| y.get(0))),
        ("parity", Box::new(|c, y| c ^ y.get(0) ^ y.get(1))),
    ];
    for (name, r) in &receivers {
        for x0 in &strings {
            for x1 in &strings {
                let cmp = ot_receiver_corruption_exact(x0, x1, r.as_ref()).map_err(|e| e.to_string())?;
                ensure(cmp.identical(), || format!("receiver strategy {name}, x0={x0} x1={x1}: tv {}", cmp.tv()))?;
            }
        }
    }
    Ok(format!(
        "{checked} honest executions correct; {} sender and {} receiver strategies simulated exactly",
        senders.len(),
        receivers.len()
    ))
}

fn composed_stack() -> Verdict {
    let eps = 1.0 / 16.0;
    let budget = composed_bc_error(eps).map_err(|e| e.to_string())?;
    ensure(budget.ell == 4, || format!("budget ell {}", budget.ell))?;
    let cfg = ComposeConfig::bqs(64, 4, eps);
    let runs = map_trials(1000, |t| {
        let b = (t % 2) as u8;
        compose_bc(b, 1, &cfg, &mut trial_rng(113, t)).map(|r| (b, r))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(|e| e.to_string())?;
    let correct = runs.iter().filter(|(b, r)| r.verifier_output == Some(*b)).count();
    ensure(correct == 1000, || format!("{correct}/1000 correct"))?;
    for (_, r) in &runs {
        ensure(r.error_budget.total == 6.0 * eps, || format!("error budget {}", r.error_budget.total))?;
        ensure(r.ell_matches_eps, || "ell does not match log(1/eps)".into())?;
        let names: Vec<&str> = r.phases.iter().map(|p| p.name.as_str()).collect();
        ensure(names == ["tor", "commit", "open"], || format!("phases {names:?}"))?;
    }
    Ok(format!("1000/1000 correct at n=64, l=4; error budget {} = 6*eps", 6.0 * eps))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 13] = [
        ("honest BQS-OT correctness", honest_correctness),
        ("BB84 statistics", bb84_statistics),
        ("two-universality", two_universality),
        ("privacy amplification", privacy_amplification),
        ("min-entropy splitting", splitting),
        ("chain rule and monotonicity", chain_and_monotonicity),
        ("bounds", bounds),
        ("EPR-teleport attack", epr_teleport),
        ("reflection attack", reflection),
        ("BC binding", bc_binding),
        ("BC hiding", bc_hiding),
        ("OT from ROT", ot_from_rot),
        ("composed commitment", composed_stack),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
