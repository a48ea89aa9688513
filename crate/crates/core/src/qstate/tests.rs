use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use super::random::{random_mixed, random_pure, random_unitary};
use super::*;
use crate::rng::trial_rng;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn bits(s: &str) -> BitString {
    s.parse().unwrap()
}

fn bases(s: &str) -> BasisString {
    BasisString::new(s.parse().unwrap()).unwrap()
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn amps(state: &QuantumState) -> Vec<C64> {
    state.amplitudes().unwrap().iter().copied().collect()
}

fn assert_amps(state: &QuantumState, expected: &[f64]) {
    let got = amps(state);
    assert_eq!(got.len(), expected.len());
    for (g, e) in got.iter().zip(expected) {
        assert_abs_diff_eq!(g.re, *e, epsilon = 1e-12);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-12);
    }
}

#[test]
fn encode_single_qubits() {
    assert_amps(&encode_bb84(&bits("0"), &bases("0")).unwrap(), &[1.0, 0.0]);
    assert_amps(&encode_bb84(&bits("1"), &bases("1")).unwrap(), &[H, -H]);
}

#[test]
fn encode_two_qubits_is_tensor_product() {
    assert_amps(&encode_bb84(&bits("00"), &bases("01")).unwrap(), &[H, H, 0.0, 0.0]);
    assert_amps(&encode_bb84(&bits("01"), &bases("01")).unwrap(), &[H, -H, 0.0, 0.0]);
    assert_amps(&encode_bb84(&bits("10"), &bases("01")).unwrap(), &[0.0, 0.0, H, H]);
}

#[test]
fn encode_errors() {
    assert!(matches!(
        encode_bb84(&bits("01"), &bases("0")),
        Err(QStateError::LengthMismatch { .. })
    ));
    let x = BitString::zeros(15);
    let b = BasisString::uniform(15, Basis::Computational);
    assert!(matches!(encode_bb84(&x, &b), Err(QStateError::TooManyQubits { .. })));
    // configurable cap
    assert!(encode_bb84_capped(&x, &b, 15).is_ok());
    assert!(encode_bb84_capped(&BitString::zeros(3), &BasisString::uniform(3, Basis::Hadamard), 2).is_err());
}

#[test]
fn measuring_zero_in_computational_basis_is_certain() {
    let s = encode_bb84(&bits("0"), &bases("0")).unwrap();
    let (p, _) = s.project(&["q0"], &bases("0"), &bits("0")).unwrap().unwrap();
    assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
    let mut rng = trial_rng(1, 0);
    for _ in 0..100 {
        assert_eq!(s.measure(&["q0"], &bases("0"), &mut rng).unwrap().0, bits("0"));
    }
}

#[test]
fn measuring_zero_in_hadamard_basis_is_fair() {
    let s = encode_bb84(&bits("0"), &bases("0")).unwrap();
    let (p, post) = s.project(&["q0"], &bases("1"), &bits("0")).unwrap().unwrap();
    assert_abs_diff_eq!(p, 0.5, epsilon = 1e-12);
    assert_amps(&post, &[H, H]);
}

#[test]
fn measuring_half_an_epr_pair() {
    let epr = gates::epr_pair("a", "b").unwrap();
    let mut rng = trial_rng(2, 0);
    let mut ones = 0;
    let n = 10_000;
    for _ in 0..n {
        let (out, post) = epr.measure(&["a"], &bases("0"), &mut rng).unwrap();
        let expected = QuantumState::basis_state(labels(&["a", "b"]), if out.get(0) == 1 { 3 } else { 0 }).unwrap();
        assert!(trace_distance(&post, &expected).unwrap() < 1e-9);
        ones += out.get(0) as usize;
    }
    let freq = ones as f64 / n as f64;
    assert!((freq - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt());
}

#[test]
fn measurement_is_replayable() {
    let s = encode_bb84(&bits("0101"), &bases("1111")).unwrap();
    let targets = ["q0", "q1", "q2", "q3"];
    let a = s.measure(&targets, &bases("0000"), &mut trial_rng(9, 4)).unwrap();
    let b = s.measure(&targets, &bases("0000"), &mut trial_rng(9, 4)).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
}

#[test]
fn measure_errors() {
    let s = encode_bb84(&bits("01"), &bases("01")).unwrap();
    let mut rng = trial_rng(0, 0);
    assert!(matches!(s.measure(&["zz"], &bases("0"), &mut rng), Err(QStateError::UnknownRegister(_))));
    assert!(s.measure(&["q0"], &bases("00"), &mut rng).is_err());
}

#[test]
fn unitary_examples() {
    let zero = encode_bb84(&bits("0"), &bases("0")).unwrap();
    let same = zero.apply_unitary(&["q0"], &gates::identity(1)).unwrap();
    assert_eq!(same, zero);
    let plus = zero.apply_unitary(&["q0"], &gates::hadamard()).unwrap();
    assert!(trace_distance(&plus, &encode_bb84(&bits("0"), &bases("1")).unwrap()).unwrap() < 1e-12);
    let ten = QuantumState::basis_state(labels(&["c", "t"]), 0b10).unwrap();
    let out = ten.apply_unitary(&["c", "t"], &gates::cnot()).unwrap();
    assert_amps(&out, &[0.0, 0.0, 0.0, 1.0]);
    // target order matters: control on "t" leaves |10⟩ unchanged
    let out = ten.apply_unitary(&["t", "c"], &gates::cnot()).unwrap();
    assert_amps(&out, &[0.0, 0.0, 1.0, 0.0]);
}

#[test]
fn non_unitary_is_rejected() {
    let zero = encode_bb84(&bits("0"), &bases("0")).unwrap();
    let p = gates::projector(0, Basis::Computational);
    assert!(matches!(zero.apply_unitary(&["q0"], &p), Err(QStateError::NotUnitary(_))));
}

#[test]
fn partial_trace_examples() {
    let prod = encode_bb84(&bits("01"), &bases("00")).unwrap();
    let reduced = prod.partial_trace(&["q1"]).unwrap();
    let zero = QuantumState::basis_state(labels(&["q0"]), 0).unwrap();
    assert!(trace_distance(&reduced, &zero).unwrap() < 1e-12);

    let epr = gates::epr_pair("a", "b").unwrap();
    let half = epr.partial_trace(&["b"]).unwrap();
    let expected = DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
    assert!((half.density() - expected).iter().all(|v| v.norm() < 1e-12));

    assert!(matches!(epr.partial_trace(&["a", "b"]), Err(QStateError::DiscardAll)));
}

#[test]
fn partial_trace_composes() {
    let mut rng = trial_rng(3, 0);
    let s = random_pure(labels(&["a", "b", "c", "d"]), &mut rng).unwrap();
    let stepwise = s.partial_trace(&["a"]).unwrap().partial_trace(&["c"]).unwrap();
    let at_once = s.partial_trace(&["a", "c"]).unwrap();
    assert!(trace_distance(&stepwise, &at_once).unwrap() < 1e-12);
    let mixed = random_mixed(labels(&["a", "b", "c"]), &mut rng).unwrap();
    let stepwise = mixed.partial_trace(&["c"]).unwrap().partial_trace(&["a"]).unwrap();
    let at_once = mixed.partial_trace(&["a", "c"]).unwrap();
    assert!(trace_distance(&stepwise, &at_once).unwrap() < 1e-12);
}

#[test]
fn trace_distance_examples() {
    let zero = encode_bb84(&bits("0"), &bases("0")).unwrap();
    let one = encode_bb84(&bits("1"), &bases("0")).unwrap();
    let plus = encode_bb84(&bits("0"), &bases("1")).unwrap();
    assert_abs_diff_eq!(trace_distance(&zero, &zero).unwrap(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(trace_distance(&zero, &one).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(trace_distance(&zero, &plus).unwrap(), H, epsilon = 1e-12);
    // same values through the density-matrix route
    let zm = zero.to_mixed().unwrap();
    assert_abs_diff_eq!(trace_distance(&zm, &plus.to_mixed().unwrap()).unwrap(), H, epsilon = 1e-12);
    assert_abs_diff_eq!(trace_distance(&zm, &one).unwrap(), 1.0, epsilon = 1e-12);
    let pair = encode_bb84(&bits("00"), &bases("00")).unwrap();
    assert!(matches!(trace_distance(&zero, &pair), Err(QStateError::DimensionMismatch { .. })));
}

#[test]
fn teleport_basis_payloads() {
    for (x, b) in [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")] {
        let payload = encode_bb84(&bits(x), &bases(b)).unwrap();
        for seed in 0..16 {
            let epr = gates::epr_pair("e_local", "e_remote").unwrap();
            let out = teleport(&payload, "q0", &epr, &mut trial_rng(seed, 0)).unwrap();
            assert_eq!(out.remote.labels(), &["e_remote".to_string()]);
            assert!(trace_distance(&out.remote, &payload).unwrap() < 1e-9);
        }
    }
}

#[test]
fn teleport_entangled_payload() {
    // Reference R entangled with payload P; the final (R, remote) state must
    // equal the original (R, P) state.
    let mut rng = trial_rng(5, 0);
    for trial in 0..20 {
        let joint = random_pure(labels(&["R", "P"]), &mut rng).unwrap();
        let epr = gates::epr_pair("A", "B").unwrap();
        let out = teleport(&joint, "P", &epr, &mut trial_rng(5, trial + 1)).unwrap();
        assert_eq!(out.remote.labels(), &["R".to_string(), "B".to_string()]);
        assert!(trace_distance(&out.remote, &joint).unwrap() < 1e-9);
    }
    // payload listed first
    let joint = random_pure(labels(&["P", "R"]), &mut rng).unwrap();
    let epr = gates::epr_pair("A", "B").unwrap();
    let out = teleport(&joint, "P", &epr, &mut rng).unwrap();
    assert!(trace_distance(&out.remote, &joint).unwrap() < 1e-9);
}

#[test]
fn teleport_rejects_product_pair() {
    let payload = encode_bb84(&bits("0"), &bases("0")).unwrap();
    let not_epr = QuantumState::basis_state(labels(&["A", "B"]), 0).unwrap();
    let err = teleport(&payload, "q0", &not_epr, &mut trial_rng(0, 0)).unwrap_err();
    assert!(matches!(err, QStateError::NotMaximallyEntangled(f) if (f - 0.5).abs() < 1e-12));
}

#[test]
fn memory_bound_examples() {
    let mut rng = trial_rng(6, 0);
    let s = encode_bb84(&bits("101"), &bases("000")).unwrap();
    let out = enforce_memory_bound(&s, &[], 0, &mut rng).unwrap();
    assert_eq!(out.classical_bits, bits("101"));
    assert_eq!(out.retained.num_qubits(), 0);

    let out = enforce_memory_bound(&s, &["q0", "q1", "q2"], 3, &mut rng).unwrap();
    assert!(out.classical_bits.is_empty());
    assert_eq!(out.retained, s);

    assert!(matches!(
        enforce_memory_bound(&s, &["q0", "q1"], 1, &mut rng),
        Err(QStateError::MemoryBoundExceeded { keep: 2, bound: 1 })
    ));

    let epr = gates::epr_pair("a", "b").unwrap();
    for seed in 0..20 {
        let out = enforce_memory_bound(&epr, &["b"], 1, &mut trial_rng(6, seed)).unwrap();
        let expected = QuantumState::basis_state(labels(&["b"]), out.classical_bits.get(0) as usize).unwrap();
        assert!(trace_distance(&out.retained, &expected).unwrap() < 1e-12);
    }
}

#[test]
fn born_rule_frequencies() {
    // |ψ⟩ = cos θ|0⟩ + sin θ|1⟩ measured in both bases.
    let theta: f64 = 0.3;
    let s = QuantumState::pure(labels(&["q"]), vec![C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)]).unwrap();
    let n = 10_000;
    for basis in ["0", "1"] {
        let p0 = s.project(&["q"], &bases(basis), &bits("0")).unwrap().unwrap().0;
        let mut rng = trial_rng(11, basis.parse().unwrap());
        let zeros = (0..n)
            .filter(|_| s.measure(&["q"], &bases(basis), &mut rng).unwrap().0.get(0) == 0)
            .count();
        let freq = zeros as f64 / n as f64;
        assert!((freq - p0).abs() <= 3.0 * (p0 * (1.0 - p0) / n as f64).sqrt(), "basis {basis}: {freq} vs {p0}");
    }
}

#[test]
fn bb84_round_trip_exhaustive() {
    for n in 1..=4usize {
        for xv in 0..1u64 << n {
            for bv in 0..1u64 << n {
                let x = BitString::from_u64(xv, n);
                let b = BasisString::new(BitString::from_u64(bv, n)).unwrap();
                let s = encode_bb84(&x, &b).unwrap();
                let targets: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
                let t: Vec<&str> = targets.iter().map(String::as_str).collect();
                let (p, _) = s.project(&t, &b, &x).unwrap().unwrap();
                assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
            }
        }
    }
}

fn random_channel(state: &QuantumState, seed: u64) -> QuantumState {
    // unitary on system + one ancilla, then trace the ancilla out
    let mut rng = trial_rng(seed, 99);
    let ancilla = QuantumState::basis_state(vec!["anc".to_string()], 0).unwrap();
    let joint = state.tensor(&ancilla).unwrap();
    let u = random_unitary(joint.dim(), &mut rng);
    let labels: Vec<String> = joint.labels().to_vec();
    let t: Vec<&str> = labels.iter().map(String::as_str).collect();
    joint.apply_unitary(&t, &u).unwrap().partial_trace(&["anc"]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bb84_round_trip(n in 1usize..=10, xv in any::<u64>(), bv in any::<u64>(), seed in any::<u64>()) {
        let x = BitString::from_u64(xv & ((1 << n) - 1), n);
        let b = BasisString::new(BitString::from_u64(bv & ((1 << n) - 1), n)).unwrap();
        let s = encode_bb84(&x, &b).unwrap();
        let targets: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        let t: Vec<&str> = targets.iter().map(String::as_str).collect();
        let (out, _) = s.measure(&t, &b, &mut trial_rng(seed, 0)).unwrap();
        prop_assert_eq!(out, x);
    }

    #[test]
    fn channels_contract_trace_distance(seed in any::<u64>(), mixed in any::<bool>()) {
        let mut rng = trial_rng(seed, 0);
        let names = vec!["a".to_string(), "b".to_string()];
        let (r, s) = if mixed {
            (random_mixed(names.clone(), &mut rng).unwrap(), random_mixed(names, &mut rng).unwrap())
        } else {
            (random_pure(names.clone(), &mut rng).unwrap(), random_pure(names, &mut rng).unwrap())
        };
        let before = trace_distance(&r, &s).unwrap();
        let after = trace_distance(&random_channel(&r, seed), &random_channel(&s, seed)).unwrap();
        prop_assert!(after <= before + 1e-9, "{} > {}", after, before);
        // the partial trace alone is a channel too
        let r1 = r.partial_trace(&["b"]).unwrap();
        let s1 = s.partial_trace(&["b"]).unwrap();
        prop_assert!(trace_distance(&r1, &s1).unwrap() <= before + 1e-9);
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 1);
        let names = || vec!["a".to_string(), "b".to_string()];
        let a = random_mixed(names(), &mut rng).unwrap();
        let b = random_pure(names(), &mut rng).unwrap();
        let c = random_mixed(names(), &mut rng).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn unitaries_preserve_normalization(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 2);
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let s = random_mixed(names, &mut rng).unwrap();
        let u = random_unitary(4, &mut rng);
        let out = s.apply_unitary(&["c", "a"], &u).unwrap();
        prop_assert!(out.validate().is_ok());
    }
}
