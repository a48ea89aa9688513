//! Empirical total-variation distances and their confidence radii.
//!
//! For an empirical distribution `P̂` of `N` samples over `k` cells,
//! `TV(P̂, P) = max_S |P̂(S) − P(S)|`. Hoeffding on each of the `2^k` events
//! and a union bound give `TV(P̂, P) ≤ sqrt((k·ln 2 + ln(2/δ)) / (2N))` with
//! probability `1 − δ`. The single-event DKW-style value
//! `sqrt(ln(2/δ) / (2N))` is reported alongside; it does not cover the
//! maximum over events and undershoots for more than a couple of cells.

use std::collections::BTreeMap;

use serde::Serialize;

use super::HarnessError;
use crate::bits::BitString;

pub const DEFAULT_DELTA: f64 = 0.01;

/// `sqrt(ln(2/δ) / (2N))`.
pub fn dkw_radius(samples: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

/// Radius for `TV(P̂, P)` over an alphabet of `cells` values.
pub fn union_radius(samples: u64, cells: usize, delta: f64) -> f64 {
    ((cells as f64 * std::f64::consts::LN_2 + (2.0 / delta).ln()) / (2.0 * samples as f64)).sqrt()
}

/// Total-variation distance between two histograms, each normalized by its
/// own total.
pub fn histogram_tv<K: Ord>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> f64 {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    if na == 0 || nb == 0 {
        return if na == nb { 0.0 } else { 1.0 };
    }
    let mut diff = 0.0;
    for (k, &ca) in a {
        let cb = b.get(k).copied().unwrap_or(0);
        diff += (ca as f64 / na as f64 - cb as f64 / nb as f64).abs();
    }
    for (k, &cb) in b {
        if !a.contains_key(k) {
            diff += cb as f64 / nb as f64;
        }
    }
    (0.5 * diff).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub samples: u64,
    pub length: usize,
    pub tv_from_uniform: f64,
    /// Hoeffding and union bound over all `2^length` cells.
    pub radius: f64,
    pub dkw_radius: f64,
    pub delta: f64,
}

impl UniformityReport {
    pub fn within_radius(&self) -> bool {
        self.tv_from_uniform <= self.radius
    }
}

/// Empirical distance of equal-length samples from the uniform
/// distribution on `{0,1}^len`.
pub fn uniformity_test(samples: &[BitString], delta: f64) -> Result<UniformityReport, HarnessError> {
    let first = samples.first().ok_or(HarnessError::EmptySamples)?;
    let len = first.len();
    if len > 24 {
        return Err(HarnessError::Config(format!("length {len} too large for a full histogram")));
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for (index, s) in samples.iter().enumerate() {
        if s.len() != len {
            return Err(HarnessError::SampleLength { index, expected: len, got: s.len() });
        }
        *counts.entry(s.to_u64()).or_insert(0) += 1;
    }
    let n = samples.len() as u64;
    let cells = 1u64 << len;
    let uniform = 1.0 / cells as f64;
    let seen: f64 = counts.values().map(|&c| (c as f64 / n as f64 - uniform).abs()).sum();
    let unseen = (cells - counts.len() as u64) as f64 * uniform;
    Ok(UniformityReport {
        samples: n,
        length: len,
        tv_from_uniform: (0.5 * (seen + unseen)).clamp(0.0, 1.0),
        radius: union_radius(n, cells as usize, delta),
        dkw_radius: dkw_radius(n, delta),
        delta,
    })
}
