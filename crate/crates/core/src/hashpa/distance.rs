//! Exact privacy-amplification distances.
//!
//! The distance of `(M·X, M, Z)` from `(U, M, Z)` averaged over uniform
//! `M` depends on `M` only through its row space `V`: for `M = A·B` with
//! `B` a basis of `V` and `A` injective, `M·X` is a relabeling of `B·X`
//! padded with `2^ℓ − 2^r` impossible outputs. Enumerating the subspaces of
//! dimension at most `ℓ` (reduced row echelon bases) replaces the `2^{ℓn}`
//! seeds by a few thousand subspaces for `n ≤ 6`.
//!
//! Sources are indexed `[z][x]`, where bit `j` of the integer `x` is input
//! bit `j`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{check_dims, HashError, MAX_EXHAUSTIVE_SEED_BITS};
use crate::qstate::trace_norm;

/// Largest input length handled by the exact distances.
pub const MAX_PA_INPUT_BITS: usize = 12;

/// A classical-quantum source: block `[z][x]` is the subnormalized state
/// `P(x, z)·ρ_{x,z}` on `q` qubits.
#[derive(Clone, Debug)]
pub struct CqSource {
    pub n: usize,
    pub q: usize,
    pub blocks: Vec<Vec<DMatrix<C64>>>,
}

impl CqSource {
    /// Wraps a classical table `p[z][x]` as a source with `q = 0`.
    pub fn classical(n: usize, p: &[Vec<f64>]) -> Self {
        let blocks = p
            .iter()
            .map(|row| row.iter().map(|&v| DMatrix::from_element(1, 1, C64::new(v, 0.0))).collect())
            .collect();
        Self { n, q: 0, blocks }
    }

    fn z_state(&self, z: usize) -> DMatrix<C64> {
        let d = 1usize << self.q;
        self.blocks[z].iter().fold(DMatrix::zeros(d, d), |acc, b| acc + b)
    }
}

fn check_table(n: usize, ell: usize, rows: impl Iterator<Item = usize>) -> Result<(), HashError> {
    check_dims(n, ell)?;
    if n > MAX_PA_INPUT_BITS {
        return Err(HashError::TooLarge(n));
    }
    for len in rows {
        if len != 1 << n {
            return Err(HashError::BadMatrix { expected: 1 << n, got: len });
        }
    }
    Ok(())
}

/// Calls `f(basis)` for every subspace of `GF(2)^n` of dimension at most
/// `max_dim`, given by its reduced row echelon basis.
pub(crate) fn for_each_subspace(n: usize, max_dim: usize, mut f: impl FnMut(&[u64])) {
    for pivots in 0u64..1 << n {
        let r = pivots.count_ones() as usize;
        if r > max_dim {
            continue;
        }
        let pivot_list: Vec<usize> = (0..n).filter(|j| pivots >> j & 1 == 1).collect();
        let free: Vec<Vec<usize>> = pivot_list
            .iter()
            .map(|&p| (p + 1..n).filter(|j| pivots >> j & 1 == 0).collect())
            .collect();
        let total: usize = free.iter().map(Vec::len).sum();
        let mut rows = vec![0u64; r];
        for assignment in 0u64..1 << total {
            let mut k = 0;
            for (i, cols) in free.iter().enumerate() {
                rows[i] = 1 << pivot_list[i];
                for &c in cols {
                    rows[i] |= (assignment >> k & 1) << c;
                    k += 1;
                }
            }
            f(&rows);
        }
    }
}

fn project(rows: &[u64], x: u64) -> usize {
    rows.iter().enumerate().fold(0, |acc, (i, r)| acc | (((r & x).count_ones() & 1) as usize) << i)
}

/// Probability that a uniform `ℓ × n` matrix has a given `r`-dimensional row space.
fn row_space_weight(n: usize, ell: usize, r: usize) -> f64 {
    (0..r).map(|i| 1.0 - (i as f64 - ell as f64).exp2()).product::<f64>()
        * (-((ell * (n - r)) as f64)).exp2()
}

/// Exact expected distance of `(M·X, M, Z)` from `(U, M, Z)` over uniform
/// `ℓ × n` matrices `M`, for a classical table `p[z][x]`.
pub fn pa_distance(n: usize, ell: usize, p: &[Vec<f64>]) -> Result<f64, HashError> {
    check_table(n, ell, p.iter().map(Vec::len))?;
    let uniform = (-(ell as f64)).exp2();
    let pz: Vec<f64> = p.iter().map(|row| row.iter().sum()).collect();
    let mut total = 0.0;
    let mut buckets = Vec::new();
    for_each_subspace(n, ell, |rows| {
        let r = rows.len();
        let images: Vec<usize> = (0..1u64 << n).map(|x| project(rows, x)).collect();
        let mut d = 0.0;
        for (row, &pz) in p.iter().zip(&pz) {
            buckets.clear();
            buckets.resize(1 << r, 0.0);
            for (x, &v) in row.iter().enumerate() {
                buckets[images[x]] += v;
            }
            d += buckets.iter().map(|b| (b - pz * uniform).abs()).sum::<f64>();
            d += ((1u64 << ell) - (1u64 << r)) as f64 * pz * uniform;
        }
        total += row_space_weight(n, ell, r) * 0.5 * d;
    });
    Ok(total)
}

/// Same quantity as [`pa_distance`] by enumerating every seed.
pub fn pa_distance_by_seeds(n: usize, ell: usize, p: &[Vec<f64>]) -> Result<f64, HashError> {
    check_table(n, ell, p.iter().map(Vec::len))?;
    if n * ell > MAX_EXHAUSTIVE_SEED_BITS {
        return Err(HashError::TooLarge(n * ell));
    }
    let uniform = (-(ell as f64)).exp2();
    let row_mask = (1u64 << n) - 1;
    let seeds = 1u64 << (n * ell);
    let mut total = 0.0;
    let mut buckets = vec![0.0; 1 << ell];
    for m in 0..seeds {
        let rows: Vec<u64> = (0..ell).map(|i| (m >> (i * n)) & row_mask).collect();
        let mut d = 0.0;
        for row in p {
            buckets.iter_mut().for_each(|b| *b = 0.0);
            for (x, &v) in row.iter().enumerate() {
                buckets[project(&rows, x as u64)] += v;
            }
            let pz: f64 = row.iter().sum();
            d += buckets.iter().map(|b| (b - pz * uniform).abs()).sum::<f64>();
        }
        total += 0.5 * d;
    }
    Ok(total / seeds as f64)
}

/// Exact expected trace distance of `ρ_{M·X, M, Z, Q}` from
/// `2^-ℓ·I ⊗ ρ_{M, Z, Q}` over uniform `ℓ × n` matrices `M`.
pub fn cq_pa_distance(source: &CqSource, ell: usize) -> Result<f64, HashError> {
    let n = source.n;
    check_table(n, ell, source.blocks.iter().map(Vec::len))?;
    let d = 1usize << source.q;
    for row in &source.blocks {
        if let Some(b) = row.iter().find(|b| b.nrows() != d || b.ncols() != d) {
            return Err(HashError::BadMatrix { expected: d, got: b.nrows() });
        }
    }
    let uniform = (-(ell as f64)).exp2();
    let z_states: Vec<DMatrix<C64>> = (0..source.blocks.len()).map(|z| source.z_state(z)).collect();
    let mut total = 0.0;
    for_each_subspace(n, ell, |rows| {
        let r = rows.len();
        let images: Vec<usize> = (0..1u64 << n).map(|x| project(rows, x)).collect();
        let mut dist = 0.0;
        for (row, rho_z) in source.blocks.iter().zip(&z_states) {
            let shifted = rho_z * C64::new(uniform, 0.0);
            let mut buckets = vec![DMatrix::<C64>::zeros(d, d); 1 << r];
            for (x, block) in row.iter().enumerate() {
                buckets[images[x]] += block;
            }
            dist += buckets.iter().map(|b| trace_norm(&(b - &shifted))).sum::<f64>();
            dist += ((1u64 << ell) - (1u64 << r)) as f64 * uniform * rho_z.trace().re;
        }
        total += row_space_weight(n, ell, r) * 0.5 * dist;
    });
    Ok(total)
}
