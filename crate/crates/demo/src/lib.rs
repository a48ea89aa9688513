//! Browser demo: three small computations exposed through wasm-bindgen.
//! Every export returns a JSON string; errors come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use bqs_core::adversary::storing_receiver;
use bqs_core::bounds::{max_ell, Variant};
use bqs_core::engine::{run_bqs_ot, PlayerProgram, ProtocolConfig};
use bqs_core::entropy::{smooth_min_entropy, JointDistribution};
use bqs_core::trial_rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest `n` the storing demo will simulate.
pub const MAX_DEMO_QUBITS: usize = 12;

fn to_json(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// `max_ell` at `points` log-spaced values of `n` in `[n_min, n_max]`.
pub fn max_ell_points(m: u64, beta: f64, eps: f64, variant: &str, n_min: u64, n_max: u64, points: usize) -> Result<Value, String> {
    let variant: Variant = variant.parse().map_err(|e: bqs_core::bounds::BoundsError| e.to_string())?;
    if n_min == 0 || n_max < n_min || points < 2 {
        return Err("need 1 ≤ n_min ≤ n_max and at least 2 points".into());
    }
    let (lo, hi) = ((n_min as f64).ln(), (n_max as f64).ln());
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let n = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp().round() as u64;
        let ell = max_ell(n, m, beta, eps, variant).map_err(|e| e.to_string())?;
        out.push(json!({ "n": n, "max_ell": ell }));
    }
    Ok(json!({ "variant": variant, "m": m, "beta": beta, "eps": eps, "points": out }))
}

/// How often a receiver storing `m` qubits learns both strings, for every
/// `m` from 0 to `n`.
pub fn storing_points(n: usize, ell: usize, trials: u64, seed: u64) -> Result<Value, String> {
    if n > MAX_DEMO_QUBITS {
        return Err(format!("n = {n} exceeds the demo limit {MAX_DEMO_QUBITS}"));
    }
    if trials == 0 {
        return Err("trials must be positive".into());
    }
    let mut out = Vec::new();
    for m in 0..=n {
        let strategy = storing_receiver(m, MAX_DEMO_QUBITS).map_err(|e| e.to_string())?;
        let program = PlayerProgram::Adversary(strategy);
        let cfg = ProtocolConfig::new(n, ell).with_memory(m);
        let mut both = 0u64;
        for t in 0..trials {
            let run = run_bqs_ot(&PlayerProgram::Honest, &program, &cfg, &mut trial_rng(seed, (m as u64) << 32 | t))
                .map_err(|e| e.to_string())?;
            let s = run.sender_output.expect("honest sender");
            if let Some([g0, g1]) = &run.receiver.guesses {
                both += (*g0 == s.s0 && *g1 == s.s1) as u64;
            }
        }
        out.push(json!({ "m": m, "both": both as f64 / trials as f64 }));
    }
    Ok(json!({ "n": n, "ell": ell, "trials": trials, "points": out }))
}

/// `H^ε_min(X)` for `X` made of `bits` independent bits, each 1 with
/// probability `bias`, at `points` values of `ε` in `[0, eps_max]`.
pub fn smooth_entropy_points(bits: u32, bias: f64, eps_max: f64, points: usize) -> Result<Value, String> {
    if bits == 0 || bits > MAX_DEMO_QUBITS as u32 {
        return Err(format!("bits must lie in 1..={MAX_DEMO_QUBITS}"));
    }
    if !(0.0..=1.0).contains(&bias) || !(0.0..1.0).contains(&eps_max) || points < 2 {
        return Err("need bias in [0, 1], eps_max in [0, 1) and at least 2 points".into());
    }
    let probs: Vec<f64> = (0..1u32 << bits)
        .map(|x| {
            let ones = x.count_ones() as i32;
            bias.powi(ones) * (1.0 - bias).powi(bits as i32 - ones)
        })
        .collect();
    let total: f64 = probs.iter().sum();
    let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
    let d = JointDistribution::from_dense(vec![("X".into(), 1 << bits)], &probs).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let eps = eps_max * i as f64 / (points - 1) as f64;
        let h = smooth_min_entropy(&d, &["X"], &[], eps).map_err(|e| e.to_string())?;
        out.push(json!({ "eps": eps, "h": h }));
    }
    Ok(json!({ "bits": bits, "bias": bias, "points": out }))
}

#[wasm_bindgen]
pub fn max_ell_curve(m: u32, beta: f64, eps: f64, variant: &str, n_min: f64, n_max: f64, points: u32) -> String {
    to_json(max_ell_points(m as u64, beta, eps, variant, n_min as u64, n_max as u64, points as usize))
}

#[wasm_bindgen]
pub fn storing_curve(n: u32, ell: u32, trials: u32, seed: u32) -> String {
    to_json(storing_points(n as usize, ell as usize, trials as u64, seed as u64))
}

#[wasm_bindgen]
pub fn smooth_entropy_curve(bits: u32, bias: f64, eps_max: f64, points: u32) -> String {
    to_json(smooth_entropy_points(bits, bias, eps_max, points as usize))
}
