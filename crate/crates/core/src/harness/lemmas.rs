//! Randomized lemma suites checked against the entropy and distance oracles.
//!
//! Case `i` of a suite draws its instance from stream `i` of the suite seed,
//! so any failing case can be replayed on its own.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{map_trials, HarnessError};
use crate::bits::BitString;
use crate::bounds::check_aux_inequality;
use crate::entropy::random::{random_chain_instance, random_distribution, random_split_instance};
use crate::entropy::{
    smooth_min_entropy, verify_chain_rule, verify_monotonicity, verify_splitting, EntropyError, JointDistribution,
    LEMMA_SLACK,
};
use crate::hashpa::{collision_probability_exhaustive, cq_pa_distance, pa_extractable_length, CqSource};
use crate::qstate::random::random_density_matrix;
use crate::rng::trial_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaSuite {
    /// Generalized min-entropy splitting.
    Splitting,
    /// Chain rule for smooth min-entropy.
    Chain,
    /// `H^ε(XY|Z) ≥ H^ε(X|Z)`.
    Monotonicity,
    /// Privacy amplification against classical and quantum side information.
    Pa,
    /// Collision probability of the hash family, by seed enumeration.
    Universality,
    /// The auxiliary inequality `(2 − log x)^{−2} ≥ c·x` on a grid.
    Aux,
}

pub const SUITE_NAMES: [&str; 6] = ["splitting", "chain", "monotonicity", "pa", "universality", "aux"];

impl LemmaSuite {
    pub const ALL: [LemmaSuite; 6] = [
        LemmaSuite::Splitting,
        LemmaSuite::Chain,
        LemmaSuite::Monotonicity,
        LemmaSuite::Pa,
        LemmaSuite::Universality,
        LemmaSuite::Aux,
    ];

    pub fn name(self) -> &'static str {
        SUITE_NAMES[LemmaSuite::ALL.iter().position(|&s| s == self).expect("listed")]
    }
}

impl FromStr for LemmaSuite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SUITE_NAMES
            .iter()
            .position(|&n| n == s)
            .map(|i| LemmaSuite::ALL[i])
            .ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for LemmaSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CaseOutcome {
    Holds { slack: f64 },
    /// The bound is non-positive, so the statement holds trivially.
    Vacuous,
    Violated { slack: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseFailure {
    pub case: u64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: LemmaSuite,
    pub seed: u64,
    pub cases: u64,
    pub violations: u64,
    pub vacuous: u64,
    /// Smallest finite slack among non-vacuous cases.
    pub min_slack: Option<f64>,
    pub worst_case: Option<u64>,
    /// Up to ten violating cases.
    pub failures: Vec<CaseFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn judged(lhs: f64, rhs: f64) -> CaseOutcome {
    let slack = lhs - rhs;
    if slack >= -LEMMA_SLACK {
        CaseOutcome::Holds { slack }
    } else {
        CaseOutcome::Violated { slack }
    }
}

fn splitting_case(seed: u64, case: u64) -> Result<CaseOutcome, HarnessError> {
    let inst = random_split_instance(&mut trial_rng(seed, case));
    match verify_splitting(&inst.dist, inst.eps, None, inst.beta) {
        Ok((report, _)) => Ok(judged(report.lhs, report.rhs)),
        Err(EntropyError::InvalidAlphaBeta { .. }) => Ok(CaseOutcome::Vacuous),
        Err(e) => Err(e.into()),
    }
}

fn chain_case(seed: u64, case: u64) -> Result<CaseOutcome, HarnessError> {
    let inst = random_chain_instance(&mut trial_rng(seed, case));
    let r = verify_chain_rule(&inst.dist, &["X"], &["Y"], &["Z"], inst.eps, inst.eps2)?;
    if r.rhs == f64::NEG_INFINITY || r.rhs <= 0.0 {
        return Ok(CaseOutcome::Vacuous);
    }
    Ok(judged(r.lhs, r.rhs))
}

fn monotonicity_case(seed: u64, case: u64) -> Result<CaseOutcome, HarnessError> {
    let mut rng = trial_rng(seed, case);
    let vars = [("X", rng.gen_range(1..=8u32)), ("Y", rng.gen_range(1..=8u32)), ("Z", rng.gen_range(1..=8u32))];
    let eps = *[0.0, 0.01, 0.1, 0.3].choose(&mut rng).expect("non-empty");
    let d = random_distribution(&vars, &mut rng);
    let r = verify_monotonicity(&d, &["X"], &["Y"], &["Z"], eps)?;
    Ok(judged(r.lhs, r.rhs))
}

/// One privacy-amplification instance: a cq source with its classical
/// marginal, the smoothing parameter and the extracted length.
#[derive(Clone, Debug)]
pub struct PaInstance {
    pub source: CqSource,
    pub eps: f64,
    pub eps_smooth: f64,
    /// `H^{ε′}(X | Z)` of the classical part.
    pub h_min: f64,
    pub ell: usize,
}

impl PaInstance {
    pub fn bound(&self) -> f64 {
        self.eps + 2.0 * self.eps_smooth
    }
}

/// `|X| ≤ 64`, `Z` with at most 4 values, `q ∈ {0, 1, 2}` qubits of random
/// mixed side information, and `ℓ ≥ 1` from [`pa_extractable_length`].
pub fn random_pa_instance<R: Rng + ?Sized>(rng: &mut R) -> Result<PaInstance, HarnessError> {
    const EPS: [f64; 5] = [1.0 / 16.0, 0.125, 0.25, 0.5, 0.75];
    loop {
        let q = rng.gen_range(0..=2usize);
        let n = rng.gen_range((q + 2).max(3)..=6usize);
        let zs = rng.gen_range(1..=4usize);
        let spread = [0.1, 0.5, 1.0, 3.0][rng.gen_range(0..4)];
        let raw: Vec<f64> = (0..zs << n).map(|_| 1.0 + spread * rng.gen::<f64>().powi(2)).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|v| v / total).collect();
        // Dense layout is `[z][x]` with `x` varying fastest.
        let dist = JointDistribution::from_dense(vec![("Z".into(), zs as u32), ("X".into(), 1 << n)], &probs)?;
        let eps_smooth = *[0.0, 0.01, 0.05, 0.1].choose(rng).expect("non-empty");
        let h_min = smooth_min_entropy(&dist, &["X"], &["Z"], eps_smooth)?;
        let options: Vec<(f64, usize)> = EPS
            .iter()
            .map(|&e| (e, pa_extractable_length(h_min, q, e)))
            .filter(|&(_, l)| l >= 1 && l <= n)
            .collect();
        let Some(&(eps, ell)) = options.choose(rng) else { continue };
        let d = 1usize << q;
        let blocks = probs
            .chunks(1 << n)
            .map(|row| row.iter().map(|&p| random_density_matrix(d, rng) * C64::new(p, 0.0)).collect())
            .collect();
        return Ok(PaInstance { source: CqSource { n, q, blocks }, eps, eps_smooth, h_min, ell });
    }
}

fn pa_case(seed: u64, case: u64) -> Result<CaseOutcome, HarnessError> {
    let inst = random_pa_instance(&mut trial_rng(seed, case))?;
    let distance = cq_pa_distance(&inst.source, inst.ell)?;
    Ok(judged(inst.bound(), distance))
}

fn universality_case(seed: u64, case: u64) -> Result<CaseOutcome, HarnessError> {
    let mut rng = trial_rng(seed, case);
    let n = rng.gen_range(2..=6usize);
    let ell = rng.gen_range(1..=n.min(16 / n));
    let x0 = BitString::random(n, &mut rng);
    let mut x1 = BitString::random(n, &mut rng);
    while x1 == x0 {
        x1 = BitString::random(n, &mut rng);
    }
    let p = collision_probability_exhaustive(n, ell, &x0, &x1)?;
    let target = (-(ell as f64)).exp2();
    Ok(if p == target { CaseOutcome::Holds { slack: 0.0 } } else { CaseOutcome::Violated { slack: -(p - target).abs() } })
}

fn aux_case(cases: u64, case: u64) -> Result<CaseOutcome, HarnessError> {
    let x = 0.5 * (case + 1) as f64 / cases as f64;
    let r = check_aux_inequality(x)?;
    Ok(judged(r.lhs, r.rhs))
}

fn run_case(suite: LemmaSuite, seed: u64, cases: u64, case: u64) -> Result<CaseOutcome, HarnessError> {
    match suite {
        LemmaSuite::Splitting => splitting_case(seed, case),
        LemmaSuite::Chain => chain_case(seed, case),
        LemmaSuite::Monotonicity => monotonicity_case(seed, case),
        LemmaSuite::Pa => pa_case(seed, case),
        LemmaSuite::Universality => universality_case(seed, case),
        LemmaSuite::Aux => aux_case(cases, case),
    }
}

/// Runs `cases` instances of `suite`.
pub fn run_suite(suite: LemmaSuite, cases: u64, seed: u64) -> Result<SuiteReport, HarnessError> {
    if cases == 0 {
        return Err(HarnessError::Config("cases must be at least 1".into()));
    }
    let outcomes = map_trials(cases, |case| run_case(suite, seed, cases, case));
    let mut report = SuiteReport {
        suite,
        seed,
        cases,
        violations: 0,
        vacuous: 0,
        min_slack: None,
        worst_case: None,
        failures: Vec::new(),
    };
    for (case, outcome) in outcomes.into_iter().enumerate() {
        let case = case as u64;
        let slack = match outcome? {
            CaseOutcome::Vacuous => {
                report.vacuous += 1;
                continue;
            }
            CaseOutcome::Holds { slack } => slack,
            CaseOutcome::Violated { slack } => {
                report.violations += 1;
                if report.failures.len() < 10 {
                    report.failures.push(CaseFailure { case, slack });
                }
                slack
            }
        };
        if slack.is_finite() && report.min_slack.is_none_or(|m| slack < m) {
            report.min_slack = Some(slack);
            report.worst_case = Some(case);
        }
    }
    Ok(report)
}
