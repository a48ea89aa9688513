//! Two-universal hashing with uniformly random GF(2) linear maps, and
//! privacy amplification.
//!
//! A seed is an `ℓ × n` binary matrix `M` and `h(M, x) = M·x`. For
//! `x0 ≠ x1` the difference `M·(x0 ⊕ x1)` is uniform over `{0,1}^ℓ`, so the
//! family collides with probability exactly `2^-ℓ`.

pub mod distance;

use rand::Rng;
use thiserror::Error;

use crate::bits::BitString;

pub use distance::{cq_pa_distance, pa_distance, pa_distance_by_seeds, CqSource};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HashError {
    #[error("invalid dimensions n={n}, ell={ell}: need 1 <= ell <= n")]
    InvalidDimensions { n: usize, ell: usize },
    #[error("input has {got} bits, seed expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("collision probability needs distinct inputs")]
    IdenticalInputs,
    #[error("exhaustive enumeration over 2^{0} seeds is too large")]
    TooLarge(usize),
    #[error("matrix data has {got} entries, expected {expected}")]
    BadMatrix { expected: usize, got: usize },
}

/// Largest `n·ℓ` for exhaustive seed enumeration.
pub const MAX_EXHAUSTIVE_SEED_BITS: usize = 24;

/// An `ℓ × n` binary matrix, rows packed into 64-bit words (column `j` is
/// bit `j % 64` of word `j / 64`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HashSeed {
    n: usize,
    ell: usize,
    words: usize,
    data: Vec<u64>,
}

fn check_dims(n: usize, ell: usize) -> Result<(), HashError> {
    if ell == 0 || ell > n {
        return Err(HashError::InvalidDimensions { n, ell });
    }
    Ok(())
}

fn pack(x: &BitString) -> Vec<u64> {
    let mut out = vec![0u64; x.len().div_ceil(64)];
    for (j, b) in x.iter().enumerate() {
        out[j / 64] |= (b as u64) << (j % 64);
    }
    out
}

impl HashSeed {
    /// Builds a seed from rows of bits; every row must have length `n`.
    pub fn from_rows(n: usize, rows: &[BitString]) -> Result<Self, HashError> {
        check_dims(n, rows.len())?;
        let words = n.div_ceil(64);
        let mut data = Vec::with_capacity(words * rows.len());
        for row in rows {
            if row.len() != n {
                return Err(HashError::LengthMismatch { expected: n, got: row.len() });
            }
            data.extend(pack(row));
        }
        Ok(Self { n, ell: rows.len(), words, data })
    }

    /// Seed whose row `i` is given by the low `n` bits of `rows[i]`, column
    /// `j` being bit `j`. Requires `n ≤ 64`.
    pub fn from_masks(n: usize, rows: &[u64]) -> Result<Self, HashError> {
        check_dims(n, rows.len())?;
        if n > 64 {
            return Err(HashError::InvalidDimensions { n, ell: rows.len() });
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Ok(Self { n, ell: rows.len(), words: 1, data: rows.iter().map(|r| r & mask).collect() })
    }

    pub fn zero(n: usize, ell: usize) -> Result<Self, HashError> {
        check_dims(n, ell)?;
        let words = n.div_ceil(64);
        Ok(Self { n, ell, words, data: vec![0; words * ell] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Seed length in bits.
    pub fn seed_bits(&self) -> usize {
        self.n * self.ell
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        ((self.data[row * self.words + col / 64] >> (col % 64)) & 1) as u8
    }

    pub fn row(&self, i: usize) -> BitString {
        BitString::new((0..self.n).map(|j| self.entry(i, j)).collect()).expect("entries are bits")
    }

    /// The matrix in row-major order as a bit string.
    pub fn to_bits(&self) -> BitString {
        let mut out = BitString::zeros(0);
        for i in 0..self.ell {
            for j in 0..self.n {
                out.push(self.entry(i, j));
            }
        }
        out
    }

    /// Row-major bits packed MSB-first, hex encoded.
    pub fn to_hex(&self) -> String {
        self.to_bits().to_hex()
    }

    /// `M·x` over GF(2).
    pub fn hash(&self, x: &BitString) -> Result<BitString, HashError> {
        if x.len() != self.n {
            return Err(HashError::LengthMismatch { expected: self.n, got: x.len() });
        }
        let xw = pack(x);
        let bits = self
            .data
            .chunks(self.words)
            .map(|row| (row.iter().zip(&xw).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1) as u8)
            .collect();
        Ok(BitString::new(bits).expect("parities are bits"))
    }
}

/// Uniformly random `ℓ × n` matrix.
pub fn sample_hash_seed<R: Rng + ?Sized>(n: usize, ell: usize, rng: &mut R) -> Result<HashSeed, HashError> {
    let mut seed = HashSeed::zero(n, ell)?;
    let tail = n % 64;
    for (k, w) in seed.data.iter_mut().enumerate() {
        *w = rng.gen();
        if tail != 0 && k % seed.words == seed.words - 1 {
            *w &= (1u64 << tail) - 1;
        }
    }
    Ok(seed)
}

pub fn hash(seed: &HashSeed, x: &BitString) -> Result<BitString, HashError> {
    seed.hash(x)
}

fn check_pair(n: usize, ell: usize, x0: &BitString, x1: &BitString) -> Result<(), HashError> {
    check_dims(n, ell)?;
    for x in [x0, x1] {
        if x.len() != n {
            return Err(HashError::LengthMismatch { expected: n, got: x.len() });
        }
    }
    if x0 == x1 {
        return Err(HashError::IdenticalInputs);
    }
    Ok(())
}

/// Exact collision probability over a uniform seed: `M·d` is uniform for
/// any non-zero difference `d`, so it equals `2^-ℓ`.
pub fn collision_probability(n: usize, ell: usize, x0: &BitString, x1: &BitString) -> Result<f64, HashError> {
    check_pair(n, ell, x0, x1)?;
    Ok((-(ell as f64)).exp2())
}

/// Collision probability by enumerating all `2^{nℓ}` seeds.
pub fn collision_probability_exhaustive(
    n: usize,
    ell: usize,
    x0: &BitString,
    x1: &BitString,
) -> Result<f64, HashError> {
    check_pair(n, ell, x0, x1)?;
    if n * ell > MAX_EXHAUSTIVE_SEED_BITS {
        return Err(HashError::TooLarge(n * ell));
    }
    let (a, b) = (pack(x0)[0], pack(x1)[0]);
    let row_mask = (1u64 << n) - 1;
    let total = 1u64 << (n * ell);
    let collisions = (0..total)
        .filter(|&m| {
            (0..ell).all(|i| {
                let row = (m >> (i * n)) & row_mask;
                (row & a).count_ones() & 1 == (row & b).count_ones() & 1
            })
        })
        .count();
    Ok(collisions as f64 / total as f64)
}

/// `floor(h_min − q − 2·log2(1/ε))`, clamped at 0. Extracting this many
/// bits leaves the output `(ε + 2ε′)`-close to uniform when `h_min` is the
/// ε′-smooth min-entropy of the source given the classical side information
/// and the adversary holds `q` further qubits.
pub fn pa_extractable_length(h_min: f64, q: usize, eps: f64) -> usize {
    let raw = h_min - q as f64 - 2.0 * (1.0 / eps).log2();
    let floored = (raw + 1e-9).floor();
    if floored.is_nan() || floored < 0.0 {
        0
    } else {
        floored as usize
    }
}

#[cfg(test)]
mod tests;
