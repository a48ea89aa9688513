//! Closed-form parameter calculator.
//!
//! `log` is base 2 unless a formula explicitly uses `exp`/`ln`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("lambda must lie in (0, 1/2), got {0}")]
    InvalidLambda(f64),
    #[error("x must lie in (0, 0.5], got {0}")]
    InvalidX(f64),
    #[error("beta must be non-negative, got {0}")]
    InvalidBeta(f64),
    #[error("n must be at least 1")]
    InvalidN,
    #[error("ell must be at least 1")]
    InvalidEll,
    #[error("unknown variant {0:?} (expected main, pure-aux or mixed-aux)")]
    UnknownVariant(String),
    #[error("no n up to {cap} reaches ell = {ell}")]
    NoFeasibleN { ell: u64, cap: u64 },
    #[error("right-hand side is not monotone on [{lo}, {hi}]")]
    NotMonotone { lo: u64, hi: u64 },
}

/// Largest `n` searched by [`min_n`].
pub const MIN_N_CAP: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityParams {
    /// Qubits sent.
    pub n: u64,
    /// Output string length.
    pub ell: u64,
    /// Adversary quantum memory.
    pub m: u64,
    /// Auxiliary-input qubits.
    pub beta: f64,
    pub eps: f64,
    /// Quantum side-information qubits for privacy amplification.
    #[serde(default)]
    pub q: u64,
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Simulator memory.
    #[serde(default)]
    pub s: u64,
}

impl SecurityParams {
    pub fn new(n: u64, ell: u64, eps: f64) -> Self {
        Self { n, ell, m: 0, beta: 0.0, eps, q: 0, lambda: None, s: 0 }
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        check_eps(self.eps)?;
        if self.n == 0 {
            return Err(BoundsError::InvalidN);
        }
        if let Some(l) = self.lambda {
            check_lambda(l)?;
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(BoundsError::InvalidBeta(self.beta));
        }
        Ok(())
    }
}

fn check_eps(eps: f64) -> Result<f64, BoundsError> {
    if eps > 0.0 && eps < 1.0 {
        Ok((1.0 / eps).log2())
    } else {
        Err(BoundsError::InvalidEpsilon(eps))
    }
}

fn check_lambda(lambda: f64) -> Result<(), BoundsError> {
    if lambda > 0.0 && lambda < 0.5 {
        Ok(())
    } else {
        Err(BoundsError::InvalidLambda(lambda))
    }
}

/// `n/2 − 10·∛(n²·log(1/ε))`, evaluated as `n/2·(1 − ∛(8000·log(1/ε)/n))`
/// so the sign flips exactly at `n = 8000·log(1/ε)`.
pub fn uncertainty_bound(n: u64, eps: f64) -> Result<f64, BoundsError> {
    let l = check_eps(eps)?;
    if n == 0 {
        return Err(BoundsError::InvalidN);
    }
    let n = n as f64;
    Ok(n / 2.0 * (1.0 - (8000.0 * l / n).cbrt()))
}

/// `n` at which [`uncertainty_bound`] turns positive.
pub fn uncertainty_threshold(eps: f64) -> Result<f64, BoundsError> {
    Ok(8000.0 * check_eps(eps)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UncertaintyEpsilon {
    pub epsilon: f64,
    /// `ln ε`, finite even when `ε` underflows.
    pub ln_epsilon: f64,
    /// Guaranteed min-entropy `(1/2 − 2λ)·n`.
    pub rate: f64,
}

/// `ε = exp(−λ²n / (32·(2 − log λ)²))` with rate `(1/2 − 2λ)·n`.
pub fn uncertainty_epsilon(lambda: f64, n: u64) -> Result<UncertaintyEpsilon, BoundsError> {
    check_lambda(lambda)?;
    if n == 0 {
        return Err(BoundsError::InvalidN);
    }
    let n = n as f64;
    let ln_epsilon = -(lambda * lambda * n) / (32.0 * (2.0 - lambda.log2()).powi(2));
    Ok(UncertaintyEpsilon { epsilon: ln_epsilon.exp(), ln_epsilon, rate: (0.5 - 2.0 * lambda) * n })
}

/// `λ = 5·∛(log(1/ε)/n)`, the choice that turns the uncertainty relation
/// into [`uncertainty_bound`].
pub fn proof_lambda(n: u64, eps: f64) -> Result<f64, BoundsError> {
    let l = check_eps(eps)?;
    if n == 0 {
        return Err(BoundsError::InvalidN);
    }
    Ok(5.0 * (l / n as f64).cbrt())
}

/// `e³·ln(2)²/54`.
pub fn aux_coefficient() -> f64 {
    let ln2 = std::f64::consts::LN_2;
    3f64.exp() * ln2 * ln2 / 54.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuxInequality {
    pub holds: bool,
    /// `(2 − log x)^{−2}`
    pub lhs: f64,
    /// `(e³·ln(2)²/54)·x`
    pub rhs: f64,
    /// Derivative of the left side, `(2/ln 2)·(2 − log x)^{−3}/x`.
    pub lhs_slope: f64,
    /// Slope of the right side, i.e. the coefficient.
    pub rhs_slope: f64,
}

impl AuxInequality {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }

    /// Equals 1 exactly at `x = 4/e³`, the minimum over the domain.
    pub fn slope_ratio(&self) -> f64 {
        self.lhs_slope / self.rhs_slope
    }
}

pub fn check_aux_inequality(x: f64) -> Result<AuxInequality, BoundsError> {
    if !(x > 0.0 && x <= 0.5) {
        return Err(BoundsError::InvalidX(x));
    }
    let c = aux_coefficient();
    let g = 2.0 - x.log2();
    let lhs = g.powi(-2);
    let rhs = c * x;
    let lhs_slope = 2.0 / std::f64::consts::LN_2 / (g.powi(3) * x);
    Ok(AuxInequality { holds: lhs >= rhs, lhs, rhs, lhs_slope, rhs_slope: c })
}

/// Coefficient set for the memory and auxiliary-input terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `8ℓ + 10m`
    Main,
    /// `8ℓ + 2β + 4m`
    PureAux,
    /// `8ℓ + 6β + 4m`
    MixedAux,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Main, Variant::PureAux, Variant::MixedAux];

    pub fn penalty(self, m: u64, beta: f64) -> f64 {
        let m = m as f64;
        match self {
            Variant::Main => 10.0 * m,
            Variant::PureAux => 2.0 * beta + 4.0 * m,
            Variant::MixedAux => 6.0 * beta + 4.0 * m,
        }
    }
}

impl FromStr for Variant {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "main" => Ok(Variant::Main),
            "pure-aux" => Ok(Variant::PureAux),
            "mixed-aux" => Ok(Variant::MixedAux),
            other => Err(BoundsError::UnknownVariant(other.to_string())),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Main => "main",
            Variant::PureAux => "pure-aux",
            Variant::MixedAux => "mixed-aux",
        })
    }
}

/// `n − 20·∛(n²·log(1/ε)) − 12·log(1/ε) − 4`.
pub fn rhs(n: u64, eps: f64) -> Result<f64, BoundsError> {
    let l = check_eps(eps)?;
    let n = n as f64;
    Ok(n - 20.0 * (n * n * l).cbrt() - 12.0 * l - 4.0)
}

/// `RHS − penalty`: the room left for `8ℓ`.
pub fn margin(n: u64, m: u64, beta: f64, eps: f64, variant: Variant) -> Result<f64, BoundsError> {
    Ok(rhs(n, eps)? - variant.penalty(m, beta))
}

/// Largest `ℓ ≥ 0` with `8ℓ + penalty ≤ RHS`, or 0 when none exists.
pub fn max_ell(n: u64, m: u64, beta: f64, eps: f64, variant: Variant) -> Result<u64, BoundsError> {
    let room = margin(n, m, beta, eps, variant)?;
    Ok(if room < 0.0 { 0 } else { (room / 8.0).floor() as u64 })
}

/// The right-hand side grows with `n` from `(40/3)³·log(1/ε)` onwards and is
/// negative before.
fn monotone_from(eps: f64) -> Result<u64, BoundsError> {
    let l = check_eps(eps)?;
    Ok(((40.0f64 / 3.0).powi(3) * l).ceil() as u64)
}

/// Smallest `n` with `8ℓ + penalty ≤ RHS(n)`, by binary search over the
/// region where the right-hand side is increasing.
pub fn min_n(ell: u64, m: u64, beta: f64, eps: f64, variant: Variant) -> Result<u64, BoundsError> {
    let need = 8.0 * ell as f64;
    let feasible = |n: u64| margin(n, m, beta, eps, variant).map(|r| r >= need);
    let lo = monotone_from(eps)?.max(1);
    if !feasible(MIN_N_CAP)? {
        return Err(BoundsError::NoFeasibleN { ell, cap: MIN_N_CAP });
    }
    if rhs(lo, eps)? > rhs(MIN_N_CAP, eps)? || rhs(lo, eps)? > 0.0 {
        return Err(BoundsError::NotMonotone { lo, hi: MIN_N_CAP });
    }
    let (mut lo, mut hi) = (lo, MIN_N_CAP);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if lo > 1 && feasible(lo - 1)? {
        return Err(BoundsError::NotMonotone { lo: lo - 1, hi: lo });
    }
    Ok(lo)
}

/// Binding error of the commitment built from ℓ-bit OT: `2^{−ℓ}`.
pub fn bc_error(ell: u64) -> Result<f64, BoundsError> {
    if ell == 0 {
        return Err(BoundsError::InvalidEll);
    }
    Ok((-(ell as f64)).exp2())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComposedError {
    pub eps: f64,
    /// `⌈log(1/ε)⌉`, so that `2^{−ℓ} ≤ ε`.
    pub ell: u64,
    pub bc_error: f64,
    /// `6ε`.
    pub total: f64,
}

/// Error budget of commitment over BQS oblivious transfer with `ℓ = log(1/ε)`.
pub fn composed_bc_error(eps: f64) -> Result<ComposedError, BoundsError> {
    let l = check_eps(eps)?;
    let ell = ((l - 1e-9).ceil() as u64).max(1);
    Ok(ComposedError { eps, ell, bc_error: bc_error(ell)?, total: 6.0 * eps })
}

#[derive(Clone, Debug, Serialize)]
pub struct VariantReport {
    pub variant: Variant,
    pub max_ell: u64,
    pub margin: f64,
    /// Smallest `n` supporting the requested `ℓ`, if below the cap.
    pub min_n: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsReport {
    pub params: SecurityParams,
    pub log_inv_eps: f64,
    pub uncertainty_bound: f64,
    pub uncertainty_threshold: f64,
    pub uncertainty_epsilon: Option<UncertaintyEpsilon>,
    pub proof_lambda: f64,
    pub variants: Vec<VariantReport>,
    pub within_bound: bool,
    pub bc_error: Option<f64>,
    pub composed: ComposedError,
    pub pa_extractable_length: usize,
}

/// Every bound for one parameter set.
pub fn params_report(p: &SecurityParams) -> Result<ParamsReport, BoundsError> {
    p.validate()?;
    let variants = Variant::ALL
        .iter()
        .map(|&v| {
            Ok(VariantReport {
                variant: v,
                max_ell: max_ell(p.n, p.m, p.beta, p.eps, v)?,
                margin: margin(p.n, p.m, p.beta, p.eps, v)?,
                min_n: min_n(p.ell, p.m, p.beta, p.eps, v).ok(),
            })
        })
        .collect::<Result<Vec<_>, BoundsError>>()?;
    let ub = uncertainty_bound(p.n, p.eps)?;
    let main = &variants[0];
    Ok(ParamsReport {
        params: p.clone(),
        log_inv_eps: check_eps(p.eps)?,
        uncertainty_bound: ub,
        uncertainty_threshold: uncertainty_threshold(p.eps)?,
        uncertainty_epsilon: p.lambda.map(|l| uncertainty_epsilon(l, p.n)).transpose()?,
        proof_lambda: proof_lambda(p.n, p.eps)?,
        within_bound: p.ell >= 1 && p.ell <= main.max_ell,
        bc_error: bc_error(p.ell).ok(),
        composed: composed_bc_error(p.eps)?,
        pa_extractable_length: crate::hashpa::pa_extractable_length(ub.max(0.0), p.q as usize, p.eps),
        variants,
    })
}
