use std::process::{Command, Output};

use serde_json::Value;

fn bqs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bqs")).args(args).env_remove("BQS_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn params_reports_max_ell() {
    let out = bqs(&["params", "--n", "1000000", "--m", "0", "--eps", "2e-9", "--variant", "main"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["max_ell"].as_u64().unwrap() > 40_000);
    assert_eq!(v["feasible"], true);
}

#[test]
fn infeasible_params_exit_2() {
    let out = bqs(&["params", "--n", "8000", "--eps", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["max_ell"], 0);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(bqs(&["nope"]).status.code(), Some(1));
    assert_eq!(bqs(&["run-rot", "--bogus"]).status.code(), Some(1));
    assert_eq!(bqs(&["attack", "--name", "no-such-attack"]).status.code(), Some(1));
    assert_eq!(bqs(&["run-bc", "--b", "2"]).status.code(), Some(1));
    assert_eq!(bqs(&["verify-lemmas", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(bqs(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_lemmas_splitting() {
    let out = bqs(&["verify-lemmas", "--suite", "splitting", "--cases", "1000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["violations"], 0);
}

#[test]
fn reflection_attack() {
    let out = bqs(&["attack", "--name", "reflection", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["frequency"], 1.0);
    assert_eq!(v["bob_max_qubits"], 0);
    let first = &v["first"];
    assert!(first["y"] == first["x0"] || first["y"] == first["x1"]);
}

#[test]
fn epr_teleport_by_model() {
    let legacy = bqs(&["attack", "--name", "epr-teleport", "--n", "8", "--ell", "2", "--trials", "200", "--model", "legacy"]);
    assert_eq!(legacy.status.code(), Some(0));
    assert_eq!(json(&legacy)["both_frequency"], 1.0);
    let refined = bqs(&["attack", "--name", "epr-teleport", "--n", "8", "--ell", "2", "--trials", "10"]);
    assert_eq!(refined.status.code(), Some(2));
    assert_eq!(json(&refined)["violation"], true);
}

#[test]
fn storing_beyond_bound_exits_2() {
    let out = bqs(&["attack", "--name", "storing", "--n", "8", "--m", "4", "--max-qubits", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strict_bounds_refuse_insecure_lengths() {
    assert_eq!(bqs(&["run-rot", "--n", "64", "--ell", "4", "--strict"]).status.code(), Some(2));
    assert_eq!(bqs(&["run-rot", "--n", "64", "--ell", "4"]).status.code(), Some(0));
}

#[test]
fn protocol_commands_succeed() {
    let rot = json(&bqs(&["run-rot", "--n", "64", "--ell", "4", "--trials", "500"]));
    assert_eq!(rot["correct"], 500);
    let ot = bqs(&["run-ot", "--x0", "0110", "--x1", "1001", "--c", "1", "--n", "32", "--trials", "20"]);
    assert_eq!(ot.status.code(), Some(0));
    let ot = json(&ot);
    assert_eq!(ot["correct"], 20);
    assert_eq!(ot["first"]["y"], "1001");
    let bc = json(&bqs(&["run-bc", "--b", "1", "--ell", "4", "--committer", "cheat", "--trials", "4000"]));
    let f = bc["cheat_frequency"].as_f64().unwrap();
    assert!((f - 1.0 / 16.0).abs() < 0.02, "{f}");
    let bc = bqs(&["run-bc", "--b", "1", "--inner", "bqs", "--n", "32", "--ell", "2", "--trials", "50"]);
    assert_eq!(bc.status.code(), Some(0));
    assert_eq!(json(&bc)["verifier_output_b"], 50);
    let composed = json(&bqs(&["compose-bc", "--b", "1", "--n", "64", "--eps", "0.0625", "--trials", "50"]));
    assert_eq!(composed["correct"], 50);
    assert_eq!(composed["error_budget"]["total"], 0.375);
    assert_eq!(composed["ell_matches_eps"], true);
    let phases: Vec<&str> = composed["phases"].as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    assert_eq!(phases, ["tor", "commit", "open"]);
}

#[test]
fn distinguish_writes_replayable_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let args = |p: &std::path::Path| {
        vec![
            "distinguish".to_string(),
            "--scenario".into(),
            "honest-rot".into(),
            "--n".into(),
            "16".into(),
            "--trials".into(),
            "200".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    let run = |p: &std::path::Path| {
        let owned = args(p);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        Command::new(env!("CARGO_BIN_EXE_bqs")).args(&refs).env("BQS_SEED", "41").output().unwrap()
    };
    let (oa, ob) = (run(&a), run(&b));
    assert_eq!(oa.status.code(), Some(0));
    assert_eq!(ob.status.code(), Some(0));
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    let header: Value = serde_json::from_str(ta.lines().next().unwrap()).unwrap();
    assert_eq!(header["header"]["seed"], "41");
    for line in ta.lines().skip(1) {
        let row: Value = serde_json::from_str(line).unwrap();
        for key in ["trial", "round", "channel", "dir", "payload_hex", "event"] {
            assert!(row.get(key).is_some(), "{key} missing in {line}");
        }
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# small run\nn = 16\nell = 1\ntrials = 30\nseed = 5\n").unwrap();
    let out = json(&bqs(&["run-rot", "--config", cfg.to_str().unwrap(), "--trials", "12"]));
    assert_eq!(out["header"]["config"]["n"], "16");
    assert_eq!(out["header"]["config"]["seed"], "5");
    assert_eq!(out["trials"], 12);
    std::fs::write(&cfg, "nonsense\n").unwrap();
    assert_eq!(bqs(&["run-rot", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn lemma_check_on_a_csv_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.csv");
    std::fs::write(&table, "X0:2,X1:2,p\n0,0,0.25\n0,1,0.25\n1,0,0.25\n1,1,0.25\n").unwrap();
    let out = bqs(&["verify-lemmas", "--suite", "splitting", "--table", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["report"]["holds"], true);
    assert_eq!(v["report"]["rhs"], 1.0);
}
