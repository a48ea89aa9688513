use super::config::Scenario;
use super::experiment::corrupt_sender;
use super::*;
use crate::adversary::Model;
use crate::bits::BitString;
use crate::engine::{run_bqs_ot, PlayerProgram, ProtocolConfig};
use crate::rng::trial_rng;

fn cfg(scenario: Scenario, n: u64, ell: u64, trials: u64, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig { scenario, trials, seed, ..ExperimentConfig::default() };
    c.params.n = n;
    c.params.ell = ell;
    c
}

#[test]
fn key_values_round_trip() {
    let text = "# run\nscenario = storing\nn = 6\nell=1\nm = 2\n\ntrials = 50\nseed = 9\nmodel = legacy\nevery_round = true\n";
    let c = ExperimentConfig::from_key_values(text).unwrap();
    assert_eq!(c.scenario, Scenario::Storing);
    assert_eq!((c.params.n, c.params.ell, c.params.m, c.trials, c.seed), (6, 1, 2, 50, 9));
    assert_eq!(c.model, Model::Legacy);
    assert!(c.every_round);
    let again = ExperimentConfig::from_key_values(&c.to_key_values()).unwrap();
    assert_eq!(again, c);
    assert_eq!(c.resolved().len(), ExperimentConfig::KEYS.len());
}

#[test]
fn config_errors() {
    assert!(matches!(ExperimentConfig::from_key_values("bogus = 1"), Err(HarnessError::Config(_))));
    assert!(matches!(ExperimentConfig::from_key_values("n 4"), Err(HarnessError::Config(_))));
    assert!(matches!(ExperimentConfig::from_key_values("scenario = nope"), Err(HarnessError::UnknownScenario(_))));
    assert!(ExperimentConfig::from_key_values("trials = 0").is_err());
    assert!(ExperimentConfig::from_key_values("eps = 1.5").is_err());
    for name in SCENARIO_NAMES {
        assert_eq!(name.parse::<Scenario>().unwrap().name(), name);
    }
}

#[test]
fn radius_shrinks_with_samples() {
    let mut last = f64::INFINITY;
    for n in [10, 100, 1000, 10_000] {
        let r = union_radius(n, 8, DEFAULT_DELTA);
        assert!(r < last);
        assert!(r >= dkw_radius(n, DEFAULT_DELTA));
        last = r;
    }
    assert!((dkw_radius(10_000, 0.01) - ((200.0f64).ln() / 20_000.0).sqrt()).abs() < 1e-15);
}

#[test]
fn histogram_tv_basics() {
    use std::collections::BTreeMap;
    let a: BTreeMap<&str, u64> = [("x", 3), ("y", 1)].into();
    let b: BTreeMap<&str, u64> = [("x", 1), ("z", 1)].into();
    assert!((histogram_tv(&a, &b) - 0.5).abs() < 1e-12);
    assert_eq!(histogram_tv(&a, &a), 0.0);
    let c: BTreeMap<&str, u64> = [("w", 5)].into();
    assert_eq!(histogram_tv(&a, &c), 1.0);
}

#[test]
fn uniformity_of_fair_coins() {
    let mut rng = trial_rng(1, 0);
    let samples: Vec<BitString> = (0..10_000).map(|_| BitString::random(1, &mut rng)).collect();
    let r = uniformity_test(&samples, DEFAULT_DELTA).unwrap();
    assert!(r.within_radius(), "{r:?}");
}

#[test]
fn uniformity_of_a_constant() {
    let samples = vec![BitString::from_u64(1, 1); 500];
    let r = uniformity_test(&samples, DEFAULT_DELTA).unwrap();
    assert_eq!(r.tv_from_uniform, 0.5);
    assert!(!r.within_radius());
    assert!(matches!(uniformity_test(&[], 0.01), Err(HarnessError::EmptySamples)));
    let mixed = vec![BitString::zeros(2), BitString::zeros(3)];
    assert!(matches!(uniformity_test(&mixed, 0.01), Err(HarnessError::SampleLength { index: 1, .. })));
}

#[test]
fn unchosen_string_looks_uniform() {
    let pc = ProtocolConfig::new(32, 1);
    let samples: Vec<BitString> = (0..10_000)
        .map(|t| {
            let run = run_bqs_ot(&PlayerProgram::Honest, &PlayerProgram::Honest, &pc, &mut trial_rng(3, t)).unwrap();
            let c = run.receiver.c.unwrap();
            run.sender_output.unwrap().s(1 - c).clone()
        })
        .collect();
    let r = uniformity_test(&samples, DEFAULT_DELTA).unwrap();
    assert!(r.within_radius(), "{r:?}");
}

#[test]
fn honest_rot_matches_ideal() {
    let out = run_experiment_to(&cfg(Scenario::HonestRot, 32, 2, 10_000, 11)).unwrap();
    let r = &out.report;
    assert!(r.within_radius(), "tv {} radius {}", r.tv, r.radius);
    assert_eq!(r.alphabet, 32);
    assert_eq!(r.cells.values().map(|c| c[0]).sum::<u64>(), 10_000);
    // y = s_c in every real trial
    for key in r.cells.iter().filter(|(_, c)| c[0] > 0).map(|(k, _)| k) {
        let parts: Vec<&str> = key.split('|').collect();
        let c: usize = parts[0].parse().unwrap();
        assert_eq!(parts[1], parts[2 + c]);
    }
}

#[test]
fn sender_corruption_is_exact() {
    let out = run_experiment_to(&cfg(Scenario::SenderCorrupt, 8, 2, 4000, 5)).unwrap();
    let r = &out.report;
    assert!(r.exact_tv.unwrap() < 1e-12, "{:?}", r.exact_tv);
    assert!(r.within_radius(), "tv {} radius {}", r.tv, r.radius);
    assert!(corrupt_sender(8, 5).unwrap().role == crate::adversary::Role::Sender);
}

#[test]
fn epr_teleport_distinguishes_in_the_legacy_model() {
    let mut c = cfg(Scenario::EprTeleport, 6, 2, 600, 2);
    c.model = Model::Legacy;
    let r = run_experiment_to(&c).unwrap().report;
    assert_eq!(r.expected_tv, Some(0.75));
    assert!((r.tv - 0.75).abs() <= r.radius, "tv {}", r.tv);
    assert!(r.cells.iter().all(|(k, c)| c[0] == 0 || k.ends_with("|1|1")));
    c.model = Model::Refined;
    let err = run_experiment_to(&c).unwrap_err();
    assert!(err.is_violation(), "{err}");
}

#[test]
fn reflection_attack_is_visible() {
    let r = run_experiment_to(&cfg(Scenario::Reflection, 16, 2, 400, 4)).unwrap().report;
    assert_eq!(r.cells.get("1").map(|c| c[0]), Some(400));
    assert!(r.tv > r.radius);
}

#[test]
fn receiver_scenarios_run() {
    let r = run_experiment_to(&cfg(Scenario::ReceiverMeasure, 5, 1, 500, 6)).unwrap().report;
    assert!((0.0..=1.0).contains(&r.tv));
    let mut c = cfg(Scenario::Storing, 6, 1, 300, 6);
    c.params.m = 2;
    let r = run_experiment_to(&c).unwrap().report;
    assert!((0.0..=1.0).contains(&r.tv));
    let too_big = cfg(Scenario::ReceiverMeasure, 12, 1, 10, 6);
    assert!(matches!(run_experiment_to(&too_big), Err(HarnessError::ScenarioMismatch { .. })));
}

#[test]
fn memory_violation_surfaces_as_violation() {
    let mut c = cfg(Scenario::Storing, 6, 1, 10, 6);
    c.params.m = 2;
    c.max_qubits = 1;
    let err = run_experiment_to(&c).unwrap_err();
    assert!(err.is_violation(), "{err}");
}

#[test]
fn replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg(Scenario::HonestRot, 16, 2, 300, 21);
    c.out = Some(dir.path().join("a.jsonl"));
    let a = run_experiment(&c).unwrap();
    c.out = Some(dir.path().join("b.jsonl"));
    let b = run_experiment(&c).unwrap();
    let fa = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    let fb = std::fs::read(dir.path().join("b.jsonl")).unwrap();
    assert_eq!(fa, fb);
    assert_eq!(a.jsonl.as_bytes(), fa.as_slice());
    assert_eq!(serde_json::to_string(&a.report).unwrap(), serde_json::to_string(&b.report).unwrap());
    c.seed = 22;
    assert_ne!(run_experiment_to(&c).unwrap().jsonl, a.jsonl);
}

#[test]
fn jsonl_header_and_rows() {
    let out = run_experiment_to(&cfg(Scenario::HonestRot, 8, 1, 3, 1)).unwrap();
    let mut lines = out.jsonl.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["header"]["scenario"], "honest-rot");
    assert_eq!(header["header"]["n"], "8");
    assert!(header["header"].get("out").is_none());
    let mut trials = std::collections::BTreeSet::new();
    for line in lines {
        let row: crate::engine::TranscriptRow = serde_json::from_str(line).unwrap();
        trials.insert(row.trial);
    }
    assert_eq!(trials.into_iter().collect::<Vec<_>>(), vec![0, 1, 2]);
}

#[test]
fn distinguisher_calibration() {
    let mut inside = 0;
    for rep in 0..100 {
        let r = run_experiment_to(&cfg(Scenario::HonestRot, 16, 1, 500, 1000 + rep)).unwrap().report;
        inside += r.within_radius() as u32;
    }
    assert!(inside >= 99, "{inside}/100");
}

#[test]
fn lemma_suites_hold() {
    for (suite, cases) in [
        (LemmaSuite::Splitting, 200),
        (LemmaSuite::Chain, 200),
        (LemmaSuite::Monotonicity, 200),
        (LemmaSuite::Pa, 15),
        (LemmaSuite::Universality, 50),
        (LemmaSuite::Aux, 500),
    ] {
        let r = run_suite(suite, cases, 7).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.cases, cases);
    }
    assert!("bogus".parse::<LemmaSuite>().is_err());
    for name in SUITE_NAMES {
        assert_eq!(name.parse::<LemmaSuite>().unwrap().name(), name);
    }
}

#[test]
fn pa_instances_extract_at_least_one_bit() {
    let mut rng = trial_rng(4, 0);
    for _ in 0..30 {
        let inst = lemmas::random_pa_instance(&mut rng).unwrap();
        assert!(inst.ell >= 1 && inst.ell <= inst.source.n);
        assert!(inst.source.n <= 6 && inst.source.blocks.len() <= 4 && inst.source.q <= 2);
    }
}
