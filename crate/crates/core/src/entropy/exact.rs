//! Exact rational evaluation of the smoothing threshold. Every `f64`
//! probability is a dyadic rational, so the table converts without loss.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{EntropyError, JointDistribution};

pub const MAX_EXACT_CELLS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct ExactEntropy {
    pub threshold: BigRational,
    /// `−log2(threshold)`, rounded once at the end.
    pub bits: f64,
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite probability")
}

fn log2_rational(t: &BigRational) -> f64 {
    if t.is_zero() {
        return f64::NEG_INFINITY;
    }
    // Split off powers of two so huge numerators and denominators stay in range.
    let shift = t.numer().bits() as i64 - t.denom().bits() as i64;
    let scaled = if shift >= 0 {
        t / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        t * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    scaled.to_f64().expect("scaled value lies in [1/2, 2]").log2() + shift as f64
}

/// Exact smallest cap `t` with `Σ_{x,y} max(0, P(x,y) − t·P(y)) ≤ ε`.
pub fn smooth_min_entropy_exact(
    d: &JointDistribution,
    target: &[&str],
    given: &[&str],
    eps: f64,
) -> Result<ExactEntropy, EntropyError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(EntropyError::InvalidEpsilon(eps));
    }
    if d.support_size() > MAX_EXACT_CELLS {
        return Err(EntropyError::TooLarge(d.support_size()));
    }
    let (t, g) = d.split_sets(target, given)?;
    let mut py: HashMap<Vec<u32>, BigRational> = HashMap::new();
    let mut pxy: HashMap<(Vec<u32>, Vec<u32>), BigRational> = HashMap::new();
    for (k, p) in d.support() {
        let y: Vec<u32> = g.iter().map(|&i| k[i]).collect();
        let x: Vec<u32> = t.iter().map(|&i| k[i]).collect();
        let p = rational(p);
        *py.entry(y.clone()).or_insert_with(BigRational::zero) += &p;
        *pxy.entry((x, y)).or_insert_with(BigRational::zero) += p;
    }
    // (weight, joint mass, conditional)
    let mut cells: Vec<(BigRational, BigRational, BigRational)> = pxy
        .into_iter()
        .map(|((_, y), p)| {
            let w = py[&y].clone();
            let c = &p / &w;
            (w, p, c)
        })
        .collect();
    cells.sort_by(|a, b| b.2.cmp(&a.2));
    let eps = rational(eps);
    let mut mass = BigRational::zero();
    let mut weight = BigRational::zero();
    let mut threshold = BigRational::zero();
    for k in 0..cells.len() {
        mass += &cells[k].1;
        weight += &cells[k].0;
        let next = cells.get(k + 1).map_or_else(BigRational::zero, |c| c.2.clone());
        if &mass - &next * &weight > eps {
            threshold = (&mass - &eps) / &weight;
            break;
        }
    }
    let bits = -log2_rational(&threshold);
    Ok(ExactEntropy { threshold, bits })
}
