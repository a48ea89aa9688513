//! Random tables for the lemma property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{JointDistribution, J, K, X0, X1};

/// Random table over `vars`. Roughly a third of the cells are zero and the
/// rest are skewed, so tables range from near-flat to near-deterministic.
pub fn random_distribution<R: Rng + ?Sized>(vars: &[(&str, u32)], rng: &mut R) -> JointDistribution {
    let cells: usize = vars.iter().map(|v| v.1 as usize).product();
    let power = [1, 2, 4, 8][rng.gen_range(0..4)];
    let zero_rate = rng.gen_range(0.0..0.6);
    let mut w: Vec<f64> = (0..cells)
        .map(|_| if rng.gen::<f64>() < zero_rate { 0.0 } else { rng.gen::<f64>().powi(power) })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.gen_range(0..cells)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    let named = vars.iter().map(|(n, s)| (n.to_string(), *s)).collect();
    JointDistribution::from_dense(named, &w.iter().map(|v| v / total).collect::<Vec<_>>())
        .expect("normalized random table")
}

#[derive(Clone, Debug)]
pub struct SplitInstance {
    pub dist: JointDistribution,
    pub eps: f64,
    pub beta: f64,
}

/// `|X0|, |X1| ≤ 8`, optional `K` and `J` with at most 4 values each,
/// `ε ∈ {0, 0.01, 0.1}` and `β = log2 |J|`.
pub fn random_split_instance<R: Rng + ?Sized>(rng: &mut R) -> SplitInstance {
    let mut vars = vec![(X0, rng.gen_range(1..=8u32)), (X1, rng.gen_range(1..=8u32))];
    if rng.gen_bool(0.7) {
        vars.push((K, rng.gen_range(1..=4u32)));
    }
    let mut beta = 0.0;
    if rng.gen_bool(0.7) {
        let size = rng.gen_range(1..=4u32);
        vars.push((J, size));
        beta = (size as f64).log2();
    }
    let eps = *[0.0, 0.01, 0.1].choose(rng).expect("non-empty");
    SplitInstance { dist: random_distribution(&vars, rng), eps, beta }
}

#[derive(Clone, Debug)]
pub struct ChainInstance {
    pub dist: JointDistribution,
    pub eps: f64,
    pub eps2: f64,
}

/// Variables `X`, `Y`, `Z` with alphabets of at most 8 values.
pub fn random_chain_instance<R: Rng + ?Sized>(rng: &mut R) -> ChainInstance {
    let vars = [("X", rng.gen_range(1..=8u32)), ("Y", rng.gen_range(1..=8u32)), ("Z", rng.gen_range(1..=8u32))];
    let eps = *[0.01, 0.05, 0.1, 0.3].choose(rng).expect("non-empty");
    let eps2 = *[0.01, 0.05, 0.1, 0.25, 0.5].choose(rng).expect("non-empty");
    ChainInstance { dist: random_distribution(&vars, rng), eps, eps2 }
}
