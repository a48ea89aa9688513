//! Finite joint distributions, (smooth) conditional min-entropy and checkers
//! for the entropy lemmas.
//!
//! Smoothing is event based: `H^ε(X|Y)` maximizes the conditional
//! min-entropy of `P_{XE|Y}` over events `E` of probability at least `1 − ε`.
//! Capping every conditional cell `P(x|y)` at `t` costs
//! `Σ P(y)·max(0, P(x|y) − t)` of probability mass; the optimum is the
//! smallest `t` whose cost is at most `ε`, and `H^ε = −log2 t`. The cost is
//! piecewise linear in `t`, so one sorted sweep finds `t` exactly.

pub mod exact;
pub mod load;
pub mod random;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

pub use exact::{smooth_min_entropy_exact, ExactEntropy};
pub use load::{load_distribution_csv, read_distribution_csv};

/// Slack used by every lemma comparison.
pub const LEMMA_SLACK: f64 = 1e-9;
pub const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {0:?} listed twice")]
    DuplicateVariable(String),
    #[error("target variable set is empty")]
    EmptyTarget,
    #[error("target and conditioning sets overlap on {0:?}")]
    Overlap(String),
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("invalid probability {value} for outcome {outcome:?}")]
    InvalidProbability { outcome: Vec<u32>, value: f64 },
    #[error("outcome {outcome:?} is outside the declared alphabets")]
    OutOfRange { outcome: Vec<u32> },
    #[error("outcome {0:?} appears twice")]
    DuplicateOutcome(Vec<u32>),
    #[error("alphabet of {0:?} must be non-empty")]
    EmptyAlphabet(String),
    #[error("smoothing parameter {0} must lie in [0, 1)")]
    InvalidEpsilon(f64),
    #[error("need 0 <= beta < alpha, got alpha={alpha}, beta={beta}")]
    InvalidAlphaBeta { alpha: f64, beta: f64 },
    #[error("J has {size} values, more than 2^beta = {limit}")]
    AuxTooLarge { size: u32, limit: f64 },
    #[error("precondition violated: H^eps(X0 X1 | K J) = {actual} < alpha = {alpha}")]
    Precondition { alpha: f64, actual: f64 },
    #[error("table has {0} cells, too many for exact arithmetic")]
    TooLarge(usize),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub size: u32,
}

/// A probability table over named finite variables; only non-zero outcomes
/// are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    vars: Vec<Variable>,
    table: BTreeMap<Vec<u32>, f64>,
}

impl JointDistribution {
    pub fn new(
        vars: Vec<(String, u32)>,
        entries: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self, EntropyError> {
        let mut seen = HashSet::new();
        for (name, size) in &vars {
            if !seen.insert(name.as_str()) {
                return Err(EntropyError::DuplicateVariable(name.clone()));
            }
            if *size == 0 {
                return Err(EntropyError::EmptyAlphabet(name.clone()));
            }
        }
        let vars: Vec<Variable> = vars.into_iter().map(|(name, size)| Variable { name, size }).collect();
        let mut table = BTreeMap::new();
        let mut total = 0.0;
        for (outcome, p) in entries {
            if outcome.len() != vars.len() || outcome.iter().zip(&vars).any(|(v, var)| *v >= var.size) {
                return Err(EntropyError::OutOfRange { outcome });
            }
            if !p.is_finite() || p < 0.0 {
                return Err(EntropyError::InvalidProbability { outcome, value: p });
            }
            if table.contains_key(&outcome) {
                return Err(EntropyError::DuplicateOutcome(outcome));
            }
            total += p;
            if p > 0.0 {
                table.insert(outcome, p);
            }
        }
        if (total - 1.0).abs() > SUM_TOL {
            return Err(EntropyError::NotNormalized(total));
        }
        Ok(Self { vars, table })
    }

    /// Dense row-major table, last variable varying fastest.
    pub fn from_dense(vars: Vec<(String, u32)>, probs: &[f64]) -> Result<Self, EntropyError> {
        let sizes: Vec<u32> = vars.iter().map(|v| v.1).collect();
        let cells: usize = sizes.iter().map(|&s| s as usize).product();
        if probs.len() != cells {
            return Err(EntropyError::OutOfRange { outcome: vec![probs.len() as u32] });
        }
        let entries = probs.iter().enumerate().map(|(i, &p)| (unflatten(i, &sizes), p));
        Self::new(vars, entries)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn support(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.table.iter().map(|(k, &v)| (k, v))
    }

    pub fn support_size(&self) -> usize {
        self.table.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, EntropyError> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| EntropyError::UnknownVariable(name.to_string()))
    }

    pub fn has_variable(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v.name == name)
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>, EntropyError> {
        let mut seen = HashSet::new();
        names
            .iter()
            .map(|n| {
                if !seen.insert(*n) {
                    return Err(EntropyError::DuplicateVariable(n.to_string()));
                }
                self.index_of(n)
            })
            .collect()
    }

    /// Product of the alphabet sizes of `names`.
    pub fn alphabet_size(&self, names: &[&str]) -> Result<f64, EntropyError> {
        Ok(self.indices(names)?.iter().map(|&i| self.vars[i].size as f64).product())
    }

    pub fn probability(&self, outcome: &[u32]) -> f64 {
        self.table.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn marginal(&self, names: &[&str]) -> Result<JointDistribution, EntropyError> {
        let idx = self.indices(names)?;
        let mut table: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (k, p) in &self.table {
            *table.entry(idx.iter().map(|&i| k[i]).collect()).or_insert(0.0) += p;
        }
        Ok(Self { vars: idx.iter().map(|&i| self.vars[i].clone()).collect(), table })
    }

    /// Adds a variable computed from each outcome.
    pub fn with_derived(
        &self,
        name: &str,
        size: u32,
        f: impl Fn(&[u32]) -> u32,
    ) -> Result<JointDistribution, EntropyError> {
        if self.has_variable(name) {
            return Err(EntropyError::DuplicateVariable(name.to_string()));
        }
        let mut vars = self.vars.clone();
        vars.push(Variable { name: name.to_string(), size });
        let mut table = BTreeMap::new();
        for (k, &p) in &self.table {
            let mut key = k.clone();
            let v = f(k);
            if v >= size {
                key.push(v);
                return Err(EntropyError::OutOfRange { outcome: key });
            }
            key.push(v);
            table.insert(key, p);
        }
        Ok(Self { vars, table })
    }

    /// Conditional cells `(P(y), P(x|y))` for every `(x, y)` in the support.
    pub fn conditional_cells(&self, target: &[&str], given: &[&str]) -> Result<Vec<(f64, f64)>, EntropyError> {
        let (t, g) = self.split_sets(target, given)?;
        let mut py: HashMap<Vec<u32>, f64> = HashMap::new();
        let mut pxy: HashMap<(Vec<u32>, Vec<u32>), f64> = HashMap::new();
        for (k, &p) in &self.table {
            let y: Vec<u32> = g.iter().map(|&i| k[i]).collect();
            let x: Vec<u32> = t.iter().map(|&i| k[i]).collect();
            *py.entry(y.clone()).or_insert(0.0) += p;
            *pxy.entry((x, y)).or_insert(0.0) += p;
        }
        let mut cells: Vec<_> = pxy.into_iter().collect();
        cells.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(cells
            .into_iter()
            .map(|((_, y), p)| {
                let w = py[&y];
                (w, p / w)
            })
            .collect())
    }

    fn split_sets(&self, target: &[&str], given: &[&str]) -> Result<(Vec<usize>, Vec<usize>), EntropyError> {
        if target.is_empty() {
            return Err(EntropyError::EmptyTarget);
        }
        let t = self.indices(target)?;
        let g = self.indices(given)?;
        if let Some(i) = t.iter().find(|i| g.contains(i)) {
            return Err(EntropyError::Overlap(self.vars[*i].name.clone()));
        }
        Ok((t, g))
    }
}

pub(crate) fn unflatten(mut i: usize, sizes: &[u32]) -> Vec<u32> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = (i % s as usize) as u32;
        i /= s as usize;
    }
    out
}

/// Smallest cap `t` with `Σ w·max(0, c − t) ≤ ε` over cells `(w, c)`.
pub fn smoothing_threshold(cells: &[(f64, f64)], eps: f64) -> f64 {
    if eps >= 1.0 {
        return 0.0;
    }
    let mut sorted: Vec<(f64, f64)> = cells.iter().copied().filter(|c| c.1 > 0.0).collect();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (mut mass, mut weight) = (0.0, 0.0);
    for (k, &(w, c)) in sorted.iter().enumerate() {
        mass += w * c;
        weight += w;
        let next = sorted.get(k + 1).map_or(0.0, |n| n.1);
        if mass - next * weight > eps {
            return ((mass - eps) / weight).max(next);
        }
    }
    0.0
}

pub fn min_entropy(d: &JointDistribution, target: &[&str], given: &[&str]) -> Result<f64, EntropyError> {
    smooth_min_entropy(d, target, given, 0.0)
}

pub fn smooth_min_entropy(d: &JointDistribution, target: &[&str], given: &[&str], eps: f64) -> Result<f64, EntropyError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(EntropyError::InvalidEpsilon(eps));
    }
    let cells = d.conditional_cells(target, given)?;
    Ok(-smoothing_threshold(&cells, eps).log2())
}

/// Like [`smooth_min_entropy`] but `+∞` once `ε ≥ 1`.
fn smooth_or_infinite(d: &JointDistribution, target: &[&str], given: &[&str], eps: f64) -> Result<f64, EntropyError> {
    if eps >= 1.0 {
        d.split_sets(target, given)?;
        return Ok(f64::INFINITY);
    }
    smooth_min_entropy(d, target, given, eps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl LemmaReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { holds: lhs >= rhs - LEMMA_SLACK, lhs, rhs, slack: lhs - rhs }
    }
}

/// `H^{ε+ε′}(X | Y Z) ≥ H^ε(X Y | Z) − log2|𝕐| − log2(1/ε′)`.
pub fn verify_chain_rule(
    d: &JointDistribution,
    x: &[&str],
    y: &[&str],
    z: &[&str],
    eps: f64,
    eps2: f64,
) -> Result<LemmaReport, EntropyError> {
    let yz: Vec<&str> = y.iter().chain(z).copied().collect();
    let xy: Vec<&str> = x.iter().chain(y).copied().collect();
    let lhs = smooth_or_infinite(d, x, &yz, eps + eps2)?;
    let rhs = smooth_or_infinite(d, &xy, z, eps)? - d.alphabet_size(y)?.log2() - (1.0 / eps2).log2();
    Ok(LemmaReport::new(lhs, rhs))
}

/// `H^ε(X Y | Z) ≥ H^ε(X | Z)`.
pub fn verify_monotonicity(
    d: &JointDistribution,
    x: &[&str],
    y: &[&str],
    z: &[&str],
    eps: f64,
) -> Result<LemmaReport, EntropyError> {
    let xy: Vec<&str> = x.iter().chain(y).copied().collect();
    Ok(LemmaReport::new(smooth_min_entropy(d, &xy, z, eps)?, smooth_min_entropy(d, x, z, eps)?))
}

pub const X0: &str = "X0";
pub const X1: &str = "X1";
pub const K: &str = "K";
pub const J: &str = "J";

/// The choice function `f(x0, x1, k)` of the splitting construction; it
/// only depends on `(x1, k)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitResult {
    pub threshold: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `(x1, k) ↦ c` for every `(x1, k)` in the support.
    pub choices: BTreeMap<(u32, u32), u8>,
}

impl SplitResult {
    pub fn c(&self, _x0: u32, x1: u32, k: u32) -> u8 {
        self.choices.get(&(x1, k)).copied().unwrap_or(0)
    }
}

fn optional(d: &JointDistribution, name: &str) -> Option<usize> {
    d.index_of(name).ok()
}

/// `f(x0, x1, k) = 1` iff some `j` has `P(X1 = x1 | K = k, J = j) ≥ 2^{−(α−β)/2}`.
/// `K` and `J` are optional variables of `d`.
pub fn split_choice(d: &JointDistribution, alpha: f64, beta: f64) -> Result<SplitResult, EntropyError> {
    if !(beta >= 0.0 && beta < alpha) {
        return Err(EntropyError::InvalidAlphaBeta { alpha, beta });
    }
    d.index_of(X0)?;
    let ix1 = d.index_of(X1)?;
    let (ik, ij) = (optional(d, K), optional(d, J));
    if let Some(ij) = ij {
        let size = d.vars[ij].size;
        let limit = beta.exp2();
        if size as f64 > limit * (1.0 + 1e-12) {
            return Err(EntropyError::AuxTooLarge { size, limit });
        }
    }
    let threshold = (-(alpha - beta) / 2.0).exp2();
    let key = |k: &Vec<u32>| (ik.map_or(0, |i| k[i]), ij.map_or(0, |i| k[i]));
    let mut pkj: HashMap<(u32, u32), f64> = HashMap::new();
    let mut px1kj: HashMap<(u32, u32, u32), f64> = HashMap::new();
    for (k, &p) in &d.table {
        let (kk, jj) = key(k);
        *pkj.entry((kk, jj)).or_insert(0.0) += p;
        *px1kj.entry((k[ix1], kk, jj)).or_insert(0.0) += p;
    }
    let mut choices = BTreeMap::new();
    for (&(x1, k, j), &p) in &px1kj {
        let hit = p / pkj[&(k, j)] >= threshold * (1.0 - 1e-12);
        let slot = choices.entry((x1, k)).or_insert(0u8);
        if hit {
            *slot = 1;
        }
    }
    Ok(SplitResult { threshold, alpha, beta, choices })
}

/// Checks `H^ε(X_{1−C} C | K J) ≥ (α − β)/2` for `C` from [`split_choice`].
/// `alpha` defaults to `H^ε(X0 X1 | K J)`; a larger value is a
/// precondition violation.
pub fn verify_splitting(
    d: &JointDistribution,
    eps: f64,
    alpha: Option<f64>,
    beta: f64,
) -> Result<(LemmaReport, SplitResult), EntropyError> {
    let given: Vec<&str> = [K, J].into_iter().filter(|v| d.has_variable(v)).collect();
    let actual = smooth_min_entropy(d, &[X0, X1], &given, eps)?;
    let alpha = alpha.unwrap_or(actual);
    if alpha > actual + LEMMA_SLACK {
        return Err(EntropyError::Precondition { alpha, actual });
    }
    let split = split_choice(d, alpha, beta)?;
    let (ix0, ix1) = (d.index_of(X0)?, d.index_of(X1)?);
    let ik = optional(d, K);
    let with_c = d.with_derived("C", 2, |o| split.c(o[ix0], o[ix1], ik.map_or(0, |i| o[i])) as u32)?;
    let ic = with_c.vars.len() - 1;
    let other_size = d.vars[ix0].size.max(d.vars[ix1].size);
    let with_other = with_c.with_derived("X_other", other_size, |o| if o[ic] == 0 { o[ix1] } else { o[ix0] })?;
    let lhs = smooth_min_entropy(&with_other, &["X_other", "C"], &given, eps)?;
    Ok((LemmaReport::new(lhs, (alpha - beta) / 2.0), split))
}
