use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;

use super::distance::{for_each_subspace, MAX_PA_INPUT_BITS};
use super::*;
use crate::qstate::random::random_density_matrix;
use crate::qstate::{trace_distance, QuantumState};
use crate::rng::trial_rng;

fn bits(s: &str) -> BitString {
    s.parse().unwrap()
}

/// 99.9% quantile of the chi-square distribution with 255 degrees of freedom.
const CHI2_255_999: f64 = 330.52;

#[test]
fn one_by_one_seed_is_a_fair_bit() {
    let mut rng = trial_rng(1, 0);
    let n = 10_000;
    let ones = (0..n).filter(|_| sample_hash_seed(1, 1, &mut rng).unwrap().entry(0, 0) == 1).count();
    let f = ones as f64 / n as f64;
    assert!((f - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
}

#[test]
fn seeds_replay() {
    let a = sample_hash_seed(70, 3, &mut trial_rng(4, 2)).unwrap();
    let b = sample_hash_seed(70, 3, &mut trial_rng(4, 2)).unwrap();
    assert_eq!(a, b);
    assert!((0..3).all(|i| a.row(i).len() == 70));
}

#[test]
fn four_by_two_seeds_are_uniform() {
    let mut rng = trial_rng(2, 0);
    let samples = 10_000usize;
    let mut counts = [0usize; 256];
    for _ in 0..samples {
        let s = sample_hash_seed(4, 2, &mut rng).unwrap();
        counts[s.to_bits().to_u64() as usize] += 1;
    }
    let expected = samples as f64 / 256.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < CHI2_255_999, "chi-square {chi2}");
}

#[test]
fn sample_rejects_bad_dimensions() {
    let mut rng = trial_rng(0, 0);
    assert_eq!(sample_hash_seed(2, 3, &mut rng), Err(HashError::InvalidDimensions { n: 2, ell: 3 }));
    assert!(sample_hash_seed(2, 0, &mut rng).is_err());
}

#[test]
fn hash_examples() {
    let zero = HashSeed::zero(5, 3).unwrap();
    assert_eq!(zero.hash(&bits("10111")).unwrap(), bits("000"));

    let id: Vec<BitString> = (0..4).map(|i| BitString::from_u64(1 << (3 - i), 4)).collect();
    let id = HashSeed::from_rows(4, &id).unwrap();
    assert_eq!(id.hash(&bits("1011")).unwrap(), bits("1011"));

    let m = HashSeed::from_rows(3, &[bits("101"), bits("011")]).unwrap();
    assert_eq!(hash(&m, &bits("101")).unwrap(), bits("01"));
    assert_eq!(m.to_hex(), "ac");

    assert_eq!(m.hash(&bits("10")), Err(HashError::LengthMismatch { expected: 3, got: 2 }));
}

#[test]
fn wide_inputs_hash_across_words() {
    let mut rng = trial_rng(3, 0);
    let seed = sample_hash_seed(130, 5, &mut rng).unwrap();
    let x = BitString::random(130, &mut rng);
    let expected: Vec<u8> = (0..5)
        .map(|i| (0..130).map(|j| seed.entry(i, j) & x.get(j)).fold(0, |a, b| a ^ b))
        .collect();
    assert_eq!(seed.hash(&x).unwrap(), BitString::new(expected).unwrap());
}

#[test]
fn collision_examples() {
    assert_eq!(collision_probability_exhaustive(2, 1, &bits("01"), &bits("10")).unwrap(), 0.5);
    assert_eq!(
        collision_probability(2, 1, &bits("11"), &bits("11")),
        Err(HashError::IdenticalInputs)
    );
    for a in 0..8u64 {
        for b in 0..8u64 {
            if a != b {
                let (x0, x1) = (BitString::from_u64(a, 3), BitString::from_u64(b, 3));
                assert_eq!(collision_probability_exhaustive(3, 2, &x0, &x1).unwrap(), 0.25);
            }
        }
    }
}

#[test]
fn two_universality_exhaustive() {
    for n in 1..=4usize {
        for ell in 1..=n.min(2) {
            for a in 0..1u64 << n {
                for b in 0..1u64 << n {
                    if a == b {
                        continue;
                    }
                    let (x0, x1) = (BitString::from_u64(a, n), BitString::from_u64(b, n));
                    let p = collision_probability_exhaustive(n, ell, &x0, &x1).unwrap();
                    assert_eq!(p, collision_probability(n, ell, &x0, &x1).unwrap());
                    assert_eq!(p, (-(ell as f64)).exp2());
                }
            }
        }
    }
}

#[test]
fn extractable_length_examples() {
    assert_eq!(pa_extractable_length(10.0, 0, 0.5), 8);
    assert_eq!(pa_extractable_length(5.0, 5, 0.5), 0);
    assert_eq!(pa_extractable_length(20.0, 3, 1.0 / 16.0), 9);
    assert_eq!(pa_extractable_length(2.9999, 0, 1.0), 2);
}

fn gaussian_binomial(n: usize, k: usize) -> u64 {
    let num: u64 = (0..k).map(|i| (1u64 << (n - i)) - 1).product();
    let den: u64 = (0..k).map(|i| (1u64 << (k - i)) - 1).product();
    num / den
}

#[test]
fn subspace_enumeration_counts() {
    for n in 1..=6usize {
        let mut counts = vec![0u64; n + 1];
        for_each_subspace(n, n, |rows| counts[rows.len()] += 1);
        for (k, &c) in counts.iter().enumerate() {
            assert_eq!(c, gaussian_binomial(n, k), "n={n}, k={k}");
        }
    }
}

fn random_table<R: Rng>(n: usize, zs: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let raw: Vec<Vec<f64>> = (0..zs).map(|_| (0..1 << n).map(|_| rng.gen::<f64>().powi(3)).collect()).collect();
    let total: f64 = raw.iter().flatten().sum();
    raw.into_iter().map(|row| row.into_iter().map(|v| v / total).collect()).collect()
}

#[test]
fn subspace_distance_matches_seed_enumeration() {
    let mut rng = trial_rng(7, 0);
    for (n, ell) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (4, 2), (4, 3), (5, 2), (6, 2)] {
        for zs in [1, 3] {
            let p = random_table(n, zs, &mut rng);
            let fast = pa_distance(n, ell, &p).unwrap();
            let slow = pa_distance_by_seeds(n, ell, &p).unwrap();
            assert_abs_diff_eq!(fast, slow, epsilon = 1e-12);
        }
    }
}

#[test]
fn distance_edge_cases() {
    // uniform X: perfect output for every full-rank seed
    let flat = vec![vec![1.0 / 8.0; 8]];
    let d = pa_distance(3, 3, &flat).unwrap();
    let full_rank = (1.0 - 1.0 / 8.0) * (1.0 - 2.0 / 8.0) * (1.0 - 4.0 / 8.0);
    assert!(d > 0.0 && d < 1.0 - full_rank + 1e-12);
    // deterministic X: one output value
    let mut point = vec![vec![0.0; 8]];
    point[0][5] = 1.0;
    assert_abs_diff_eq!(pa_distance(3, 2, &point).unwrap(), 0.75, epsilon = 1e-12);
    assert!(pa_distance(MAX_PA_INPUT_BITS + 1, 1, &[vec![0.0; 1 << (MAX_PA_INPUT_BITS + 1)]]).is_err());
    assert!(pa_distance(3, 2, &[vec![0.5; 4]]).is_err());
}

fn random_cq<R: Rng>(n: usize, zs: usize, q: usize, rng: &mut R) -> CqSource {
    let p = random_table(n, zs, rng);
    let blocks = p
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| random_density_matrix(1 << q, rng) * C64::new(v, 0.0))
                .collect()
        })
        .collect();
    CqSource { n, q, blocks }
}

/// Per-seed trace distance built from full block-diagonal states on
/// registers (U, Z, Q), averaged over every seed.
fn cq_distance_oracle(src: &CqSource, ell: usize) -> f64 {
    let n = src.n;
    let zbits = src.blocks.len().next_power_of_two().trailing_zeros().max(1) as usize;
    let zdim = 1usize << zbits;
    let qd = 1usize << src.q;
    let labels: Vec<String> = (0..ell + zbits + src.q).map(|i| format!("r{i}")).collect();
    let dim = (1usize << ell) * zdim * qd;
    let seeds = 1u64 << (n * ell);
    let mut total = 0.0;
    for m in 0..seeds {
        let rows: Vec<u64> = (0..ell).map(|i| (m >> (i * n)) & ((1 << n) - 1)).collect();
        let seed = HashSeed::from_masks(n, &rows).unwrap();
        let mut real = DMatrix::<C64>::zeros(dim, dim);
        let mut ideal = DMatrix::<C64>::zeros(dim, dim);
        for (z, row) in src.blocks.iter().enumerate() {
            for (x, block) in row.iter().enumerate() {
                let xs = BitString::new((0..n).map(|j| (x >> j & 1) as u8).collect()).unwrap();
                let u = seed.hash(&xs).unwrap().iter().fold(0usize, |a, b| (a << 1) | b as usize);
                let at = (u * zdim + z) * qd;
                let mut view = real.view_mut((at, at), (qd, qd));
                view += block;
                for v in 0..1usize << ell {
                    let at = (v * zdim + z) * qd;
                    let mut view = ideal.view_mut((at, at), (qd, qd));
                    view += block * C64::new((-(ell as f64)).exp2(), 0.0);
                }
            }
        }
        let a = QuantumState::mixed(labels.clone(), real).unwrap();
        let b = QuantumState::mixed(labels.clone(), ideal).unwrap();
        total += trace_distance(&a, &b).unwrap();
    }
    total / seeds as f64
}

#[test]
fn cq_distance_matches_full_state_oracle() {
    let mut rng = trial_rng(8, 0);
    for (n, ell, zs, q) in [(2, 1, 1, 1), (2, 2, 2, 1), (3, 1, 2, 2), (3, 2, 1, 1), (4, 1, 2, 1), (3, 3, 1, 1)] {
        let src = random_cq(n, zs, q, &mut rng);
        let fast = cq_pa_distance(&src, ell).unwrap();
        let oracle = cq_distance_oracle(&src, ell);
        assert_abs_diff_eq!(fast, oracle, epsilon = 1e-9);
    }
}

#[test]
fn cq_reduces_to_classical() {
    let mut rng = trial_rng(9, 0);
    let p = random_table(4, 3, &mut rng);
    let classical = pa_distance(4, 2, &p).unwrap();
    let cq = cq_pa_distance(&CqSource::classical(4, &p), 2).unwrap();
    assert_abs_diff_eq!(classical, cq, epsilon = 1e-12);
}

proptest! {
    #[test]
    fn hash_is_linear(n in 1usize..=80, ell_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let ell = 1 + ((n - 1) as f64 * ell_frac) as usize;
        let mut rng = trial_rng(seed, 0);
        let m = sample_hash_seed(n, ell, &mut rng).unwrap();
        let x = BitString::random(n, &mut rng);
        let y = BitString::random(n, &mut rng);
        let lhs = m.hash(&x.xor(&y).unwrap()).unwrap();
        let rhs = m.hash(&x).unwrap().xor(&m.hash(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hex_is_row_major(n in 1usize..=9, seed in any::<u64>()) {
        let m = sample_hash_seed(n, 1 + (seed as usize % n), &mut trial_rng(seed, 1)).unwrap();
        let rows: Vec<BitString> = (0..m.ell()).map(|i| m.row(i)).collect();
        let joined = rows.iter().fold(BitString::zeros(0), |acc, r| acc.concat(r));
        prop_assert_eq!(m.to_hex(), joined.to_hex());
        prop_assert_eq!(HashSeed::from_rows(n, &rows).unwrap(), m);
    }
}
