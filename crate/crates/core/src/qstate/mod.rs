//! Exact simulation of small quantum registers.
//!
//! States are dense: a pure state is a vector of `2^k` amplitudes, a mixed
//! state a `2^k × 2^k` density matrix. Qubits carry register labels; the
//! first label is the most significant bit of the basis index, so
//! `|0⟩_q0 ⊗ |1⟩_q1` is basis index 1.

pub mod gates;
pub mod product;
pub mod random;

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::Rng;
use thiserror::Error;

use crate::bits::{Basis, BasisString, BitString};

pub use product::{encode_bb84_product, ProductState, Qubit};

pub const DEFAULT_MAX_QUBITS: usize = 14;
/// Ceiling for any dense state vector, whatever cap a caller configures.
pub const HARD_MAX_QUBITS: usize = 20;
/// Largest register turned into a density matrix (`4^k` entries).
pub const MAX_DENSITY_QUBITS: usize = 11;
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QStateError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{requested} qubits exceeds the cap of {max}")]
    TooManyQubits { requested: usize, max: usize },
    #[error("unknown register {0:?}")]
    UnknownRegister(String),
    #[error("register {0:?} appears twice")]
    DuplicateRegister(String),
    #[error("state is not normalized (norm or trace {0})")]
    NotNormalized(f64),
    #[error("density matrix is not Hermitian (deviation {0})")]
    NotHermitian(f64),
    #[error("density matrix has negative eigenvalue {0}")]
    NegativeEigenvalue(f64),
    #[error("matrix is not unitary (deviation {0})")]
    NotUnitary(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cannot discard every register")]
    DiscardAll,
    #[error("pair is not maximally entangled (fidelity {0})")]
    NotMaximallyEntangled(f64),
    #[error("keeping {keep} qubits violates the memory bound of {bound}")]
    MemoryBoundExceeded { keep: usize, bound: usize },
    #[error("outcome has zero probability")]
    ZeroProbability,
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    labels: Vec<String>,
    repr: Repr,
}

fn check_labels(labels: &[String]) -> Result<(), QStateError> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(QStateError::DuplicateRegister(l.clone()));
        }
    }
    Ok(())
}

/// Applies `op` (acting on `targets`, first target most significant) to
/// every column of `data`, viewed as `cols` contiguous vectors of length `2^n`.
fn apply_to_columns(data: &mut [C64], n: usize, targets: &[usize], op: &DMatrix<C64>) {
    let dim = 1usize << n;
    let k = targets.len();
    let shifts: Vec<usize> = targets.iter().map(|&t| n - 1 - t).collect();
    let target_mask: usize = shifts.iter().map(|s| 1 << s).sum();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|a| {
            (0..k)
                .filter(|j| (a >> (k - 1 - j)) & 1 == 1)
                .map(|j| 1 << shifts[j])
                .sum()
        })
        .collect();
    let mut gathered = vec![C64::new(0.0, 0.0); 1 << k];
    for column in data.chunks_mut(dim) {
        for base in 0..dim {
            if base & target_mask != 0 {
                continue;
            }
            for (a, off) in offsets.iter().enumerate() {
                gathered[a] = column[base | off];
            }
            for (a, off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (b, g) in gathered.iter().enumerate() {
                    acc += op[(a, b)] * g;
                }
                column[base | off] = acc;
            }
        }
    }
}

/// Eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(sym).eigenvalues.iter().copied().collect()
}

/// `Tr |M|` for Hermitian `M`.
pub fn trace_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].re.abs();
    }
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

pub fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let prod = u.adjoint() * u;
    let id = DMatrix::<C64>::identity(u.nrows(), u.ncols());
    (prod - id).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

impl QuantumState {
    /// The zero-qubit state (scalar 1).
    pub fn empty() -> Self {
        Self { labels: vec![], repr: Repr::Pure(DVector::from_element(1, C64::new(1.0, 0.0))) }
    }

    pub fn pure(labels: Vec<String>, amplitudes: Vec<C64>) -> Result<Self, QStateError> {
        check_labels(&labels)?;
        if labels.len() > HARD_MAX_QUBITS {
            return Err(QStateError::TooManyQubits { requested: labels.len(), max: HARD_MAX_QUBITS });
        }
        let dim = 1usize << labels.len();
        if amplitudes.len() != dim {
            return Err(QStateError::LengthMismatch { expected: dim, got: amplitudes.len() });
        }
        let state = Self { labels, repr: Repr::Pure(DVector::from_vec(amplitudes)) };
        state.validate()?;
        Ok(state)
    }

    pub fn mixed(labels: Vec<String>, rho: DMatrix<C64>) -> Result<Self, QStateError> {
        check_labels(&labels)?;
        if labels.len() > MAX_DENSITY_QUBITS {
            return Err(QStateError::TooManyQubits { requested: labels.len(), max: MAX_DENSITY_QUBITS });
        }
        let dim = 1usize << labels.len();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(QStateError::DimensionMismatch { left: dim, right: rho.nrows() });
        }
        let state = Self { labels, repr: Repr::Mixed(rho) };
        state.validate()?;
        Ok(state)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(labels: Vec<String>, index: usize) -> Result<Self, QStateError> {
        let dim = 1usize << labels.len();
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        if index >= dim {
            return Err(QStateError::LengthMismatch { expected: dim, got: index });
        }
        amps[index] = C64::new(1.0, 0.0);
        Self::pure(labels, amps)
    }

    /// Norm (pure) or Hermiticity, trace and positivity (mixed), at [`NORM_TOL`].
    pub fn validate(&self) -> Result<(), QStateError> {
        match &self.repr {
            Repr::Pure(v) => {
                let norm = v.norm();
                if (norm - 1.0).abs() > NORM_TOL {
                    return Err(QStateError::NotNormalized(norm));
                }
            }
            Repr::Mixed(rho) => {
                let dev = (rho - rho.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
                if dev > NORM_TOL {
                    return Err(QStateError::NotHermitian(dev));
                }
                let tr = rho.trace();
                if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
                    return Err(QStateError::NotNormalized(tr.re));
                }
                let min = hermitian_eigenvalues(rho).into_iter().fold(f64::INFINITY, f64::min);
                if min < -NORM_TOL {
                    return Err(QStateError::NegativeEigenvalue(min));
                }
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&DVector<C64>> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    pub fn density(&self) -> DMatrix<C64> {
        match &self.repr {
            Repr::Pure(v) => v * v.adjoint(),
            Repr::Mixed(rho) => rho.clone(),
        }
    }

    pub fn to_mixed(&self) -> Result<Self, QStateError> {
        if self.num_qubits() > MAX_DENSITY_QUBITS {
            return Err(QStateError::TooManyQubits { requested: self.num_qubits(), max: MAX_DENSITY_QUBITS });
        }
        Ok(Self { labels: self.labels.clone(), repr: Repr::Mixed(self.density()) })
    }

    pub fn index_of(&self, label: &str) -> Result<usize, QStateError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| QStateError::UnknownRegister(label.to_string()))
    }

    fn positions(&self, targets: &[&str]) -> Result<Vec<usize>, QStateError> {
        let mut seen = HashSet::new();
        targets
            .iter()
            .map(|t| {
                if !seen.insert(*t) {
                    return Err(QStateError::DuplicateRegister(t.to_string()));
                }
                self.index_of(t)
            })
            .collect()
    }

    /// `self ⊗ other`; labels must be disjoint.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState, QStateError> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_labels(&labels)?;
        if labels.len() > HARD_MAX_QUBITS {
            return Err(QStateError::TooManyQubits { requested: labels.len(), max: HARD_MAX_QUBITS });
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => Repr::Pure(a.kronecker(b)),
            _ => {
                if labels.len() > MAX_DENSITY_QUBITS {
                    return Err(QStateError::TooManyQubits { requested: labels.len(), max: MAX_DENSITY_QUBITS });
                }
                Repr::Mixed(self.density().kronecker(&other.density()))
            }
        };
        Ok(Self { labels, repr })
    }

    /// Applies an arbitrary operator without any unitarity check.
    fn apply_operator(&self, positions: &[usize], op: &DMatrix<C64>) -> QuantumState {
        let n = self.num_qubits();
        let repr = match &self.repr {
            Repr::Pure(v) => {
                let mut out = v.clone();
                apply_to_columns(out.as_mut_slice(), n, positions, op);
                Repr::Pure(out)
            }
            Repr::Mixed(rho) => {
                // O ρ O† = (O (O ρ)†)†
                let mut left = rho.clone();
                apply_to_columns(left.as_mut_slice(), n, positions, op);
                let mut both = left.adjoint();
                apply_to_columns(both.as_mut_slice(), n, positions, op);
                Repr::Mixed(both.adjoint())
            }
        };
        QuantumState { labels: self.labels.clone(), repr }
    }

    pub fn apply_unitary(&self, targets: &[&str], u: &DMatrix<C64>) -> Result<QuantumState, QStateError> {
        let positions = self.positions(targets)?;
        let dim = 1usize << positions.len();
        if u.nrows() != dim || u.ncols() != dim {
            return Err(QStateError::DimensionMismatch { left: dim, right: u.nrows() });
        }
        let dev = unitarity_deviation(u);
        if dev > NORM_TOL {
            return Err(QStateError::NotUnitary(dev));
        }
        Ok(self.apply_operator(&positions, u))
    }

    fn squared_norm(&self) -> f64 {
        match &self.repr {
            Repr::Pure(v) => v.norm_squared(),
            Repr::Mixed(rho) => rho.trace().re,
        }
    }

    fn scaled(mut self, factor: f64) -> QuantumState {
        match &mut self.repr {
            Repr::Pure(v) => *v *= C64::new(factor.sqrt(), 0.0),
            Repr::Mixed(rho) => *rho *= C64::new(factor, 0.0),
        }
        self
    }

    /// Projects `targets` onto `|outcome⟩_bases`. Returns the outcome
    /// probability and the normalized post-measurement state, or `None`
    /// when the outcome is impossible.
    pub fn project(
        &self,
        targets: &[&str],
        bases: &BasisString,
        outcome: &BitString,
    ) -> Result<Option<(f64, QuantumState)>, QStateError> {
        if bases.len() != targets.len() {
            return Err(QStateError::LengthMismatch { expected: targets.len(), got: bases.len() });
        }
        if outcome.len() != targets.len() {
            return Err(QStateError::LengthMismatch { expected: targets.len(), got: outcome.len() });
        }
        let positions = self.positions(targets)?;
        let total = self.squared_norm();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(QStateError::NotNormalized(total));
        }
        let mut state = self.clone();
        for (i, &pos) in positions.iter().enumerate() {
            state = state.apply_operator(&[pos], &gates::projector(outcome.get(i), bases.get(i)));
        }
        let p = state.squared_norm();
        if p <= 1e-15 {
            return Ok(None);
        }
        Ok(Some((p, state.scaled(1.0 / p))))
    }

    /// Born-rule measurement of `targets` in `bases`, one qubit at a time.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        targets: &[&str],
        bases: &BasisString,
        rng: &mut R,
    ) -> Result<(BitString, QuantumState), QStateError> {
        if bases.len() != targets.len() {
            return Err(QStateError::LengthMismatch { expected: targets.len(), got: bases.len() });
        }
        let mut state = self.clone();
        let mut bits = BitString::zeros(0);
        for (i, t) in targets.iter().enumerate() {
            let single = BasisString::uniform(1, bases.get(i));
            let zero = state.project(&[t], &single, &BitString::zeros(1))?;
            let one = state.project(&[t], &single, &BitString::from_u64(1, 1))?;
            let p0 = zero.as_ref().map_or(0.0, |(p, _)| *p);
            let (bit, next) = match (zero, one) {
                (Some((_, s0)), _) if rng.gen::<f64>() < p0 => (0, s0),
                (_, Some((_, s1))) => (1, s1),
                (Some((_, s0)), None) => (0, s0),
                (None, None) => return Err(QStateError::ZeroProbability),
            };
            bits.push(bit);
            state = next;
        }
        Ok((bits, state))
    }

    /// Removes registers that are known to be in the computational basis
    /// state given by `values` (as after a computational measurement).
    fn drop_collapsed(&self, targets: &[usize], values: &BitString) -> QuantumState {
        let n = self.num_qubits();
        let kept: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
        let fixed: usize = targets
            .iter()
            .zip(values.iter())
            .map(|(&t, v)| (v as usize) << (n - 1 - t))
            .sum();
        let full_index = |k: usize| -> usize {
            let mut idx = fixed;
            for (j, &q) in kept.iter().enumerate() {
                if (k >> (kept.len() - 1 - j)) & 1 == 1 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };
        let dk = 1usize << kept.len();
        let labels: Vec<String> = kept.iter().map(|&q| self.labels[q].clone()).collect();
        let repr = match &self.repr {
            Repr::Pure(v) => Repr::Pure(DVector::from_fn(dk, |k, _| v[full_index(k)])),
            Repr::Mixed(rho) => Repr::Mixed(DMatrix::from_fn(dk, dk, |r, c| rho[(full_index(r), full_index(c))])),
        };
        QuantumState { labels, repr }
    }

    /// Reduced density matrix on the registers not in `discard`.
    pub fn partial_trace(&self, discard: &[&str]) -> Result<QuantumState, QStateError> {
        let disc = self.positions(discard)?;
        let n = self.num_qubits();
        if disc.len() == n && n > 0 {
            return Err(QStateError::DiscardAll);
        }
        let kept: Vec<usize> = (0..n).filter(|q| !disc.contains(q)).collect();
        if kept.len() > MAX_DENSITY_QUBITS {
            return Err(QStateError::TooManyQubits { requested: kept.len(), max: MAX_DENSITY_QUBITS });
        }
        let extract = |idx: usize, qs: &[usize]| -> usize {
            qs.iter().fold(0usize, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
        };
        let dk = 1usize << kept.len();
        let dd = 1usize << disc.len();
        let mut rho = DMatrix::<C64>::zeros(dk, dk);
        match &self.repr {
            Repr::Pure(v) => {
                let mut psi = DMatrix::<C64>::zeros(dk, dd);
                for (i, a) in v.iter().enumerate() {
                    psi[(extract(i, &kept), extract(i, &disc))] = *a;
                }
                rho = &psi * psi.adjoint();
            }
            Repr::Mixed(full) => {
                let dim = self.dim();
                let split: Vec<(usize, usize)> = (0..dim).map(|i| (extract(i, &kept), extract(i, &disc))).collect();
                for i in 0..dim {
                    for j in 0..dim {
                        if split[i].1 == split[j].1 {
                            rho[(split[i].0, split[j].0)] += full[(i, j)];
                        }
                    }
                }
            }
        }
        let labels = kept.iter().map(|&q| self.labels[q].clone()).collect();
        Ok(QuantumState { labels, repr: Repr::Mixed(rho) })
    }

    /// Reorders registers to `order`, which must be a permutation of the labels.
    pub fn permuted(&self, order: &[&str]) -> Result<QuantumState, QStateError> {
        if order.len() != self.num_qubits() {
            return Err(QStateError::LengthMismatch { expected: self.num_qubits(), got: order.len() });
        }
        let src = self.positions(order)?;
        let n = self.num_qubits();
        let map = |new_idx: usize| -> usize {
            let mut old = 0usize;
            for (new_pos, &old_pos) in src.iter().enumerate() {
                if (new_idx >> (n - 1 - new_pos)) & 1 == 1 {
                    old |= 1 << (n - 1 - old_pos);
                }
            }
            old
        };
        let dim = self.dim();
        let repr = match &self.repr {
            Repr::Pure(v) => Repr::Pure(DVector::from_fn(dim, |i, _| v[map(i)])),
            Repr::Mixed(rho) => Repr::Mixed(DMatrix::from_fn(dim, dim, |r, c| rho[(map(r), map(c))])),
        };
        Ok(QuantumState { labels: order.iter().map(|s| s.to_string()).collect(), repr })
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<QuantumState, QStateError> {
        let i = self.index_of(from)?;
        let mut labels = self.labels.clone();
        labels[i] = to.to_string();
        check_labels(&labels)?;
        Ok(QuantumState { labels, repr: self.repr.clone() })
    }

    /// `⟨ψ|ρ|ψ⟩` for a pure `psi` on the same registers.
    pub fn fidelity_with_pure(&self, psi: &DVector<C64>) -> Result<f64, QStateError> {
        if psi.len() != self.dim() {
            return Err(QStateError::DimensionMismatch { left: self.dim(), right: psi.len() });
        }
        Ok(match &self.repr {
            Repr::Pure(v) => psi.dotc(v).norm_sqr(),
            Repr::Mixed(rho) => (psi.adjoint() * rho * psi)[(0, 0)].re,
        })
    }
}

/// `|x⟩_b` on registers `q0..q{n-1}`, capped at [`DEFAULT_MAX_QUBITS`].
pub fn encode_bb84(x: &BitString, b: &BasisString) -> Result<QuantumState, QStateError> {
    encode_bb84_capped(x, b, DEFAULT_MAX_QUBITS)
}

pub fn encode_bb84_capped(x: &BitString, b: &BasisString, max_qubits: usize) -> Result<QuantumState, QStateError> {
    if x.len() != b.len() {
        return Err(QStateError::LengthMismatch { expected: x.len(), got: b.len() });
    }
    let cap = max_qubits.min(HARD_MAX_QUBITS);
    if x.len() > cap {
        return Err(QStateError::TooManyQubits { requested: x.len(), max: cap });
    }
    encode_bb84_product(x, b)?.to_dense(cap)
}

pub fn measure<R: Rng + ?Sized>(
    state: &QuantumState,
    targets: &[&str],
    bases: &BasisString,
    rng: &mut R,
) -> Result<(BitString, QuantumState), QStateError> {
    state.measure(targets, bases, rng)
}

pub fn apply_unitary(state: &QuantumState, targets: &[&str], u: &DMatrix<C64>) -> Result<QuantumState, QStateError> {
    state.apply_unitary(targets, u)
}

pub fn partial_trace(state: &QuantumState, discard: &[&str]) -> Result<QuantumState, QStateError> {
    state.partial_trace(discard)
}

/// `½ Tr |ρ − σ|`. Registers are matched by position, not by label.
pub fn trace_distance(rho: &QuantumState, sigma: &QuantumState) -> Result<f64, QStateError> {
    if rho.dim() != sigma.dim() {
        return Err(QStateError::DimensionMismatch { left: rho.dim(), right: sigma.dim() });
    }
    if let (Repr::Pure(a), Repr::Pure(b)) = (&rho.repr, &sigma.repr) {
        // D = sqrt(1 - |⟨a|b⟩|²), with 1 - |⟨a|b⟩| taken from the distance
        // between phase-aligned vectors so near-equal states stay near zero.
        let ov = a.dotc(b);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
        let half_gap = ((a - b * phase).norm_squared() / 2.0).min(1.0);
        return Ok((half_gap * (2.0 - half_gap)).max(0.0).sqrt().min(1.0));
    }
    let diff = rho.density() - sigma.density();
    Ok((0.5 * trace_norm(&diff)).clamp(0.0, 1.0))
}

/// Result of a teleportation: the Bell measurement bits and the receiving
/// register, which takes the payload's place among the remaining registers.
#[derive(Clone, Debug)]
pub struct Teleported {
    pub bits: [u8; 2],
    pub remote: QuantumState,
}

/// Bell-measures `payload` together with the first half of `epr` without
/// correcting the second half. The remote register keeps its own label and
/// stands where `payload` stood.
pub fn teleport_uncorrected<R: Rng + ?Sized>(
    payload_state: &QuantumState,
    payload: &str,
    epr: &QuantumState,
    rng: &mut R,
) -> Result<Teleported, QStateError> {
    if epr.num_qubits() != 2 {
        return Err(QStateError::LengthMismatch { expected: 2, got: epr.num_qubits() });
    }
    let phi_plus = gates::epr_pair("a", "b")?;
    let fidelity = epr.fidelity_with_pure(phi_plus.amplitudes().expect("pure"))?;
    if fidelity < 1.0 - NORM_TOL {
        return Err(QStateError::NotMaximallyEntangled(fidelity));
    }
    payload_state.index_of(payload)?;
    let local = epr.labels()[0].clone();
    let remote = epr.labels()[1].clone();
    let joint = payload_state.tensor(epr)?;
    let joint = joint.apply_unitary(&[payload, &local], &gates::cnot())?;
    let joint = joint.apply_unitary(&[payload], &gates::hadamard())?;
    let bases = BasisString::uniform(2, Basis::Computational);
    let (bits, collapsed) = joint.measure(&[payload, &local], &bases, rng)?;
    let positions = [collapsed.index_of(payload)?, collapsed.index_of(&local)?];
    let rest = collapsed.drop_collapsed(&positions, &bits);
    let order: Vec<String> = payload_state
        .labels()
        .iter()
        .map(|l| if l == payload { remote.clone() } else { l.clone() })
        .collect();
    let order_ref: Vec<&str> = order.iter().map(String::as_str).collect();
    let remote_state = rest.permuted(&order_ref)?;
    Ok(Teleported { bits: [bits.get(0), bits.get(1)], remote: remote_state })
}

/// Pauli correction `Z^{b0} X^{b1}` on `target` for Bell bits `bits`.
pub fn teleport_correction(state: &QuantumState, target: &str, bits: [u8; 2]) -> Result<QuantumState, QStateError> {
    let mut out = state.clone();
    if bits[1] == 1 {
        out = out.apply_unitary(&[target], &gates::pauli_x())?;
    }
    if bits[0] == 1 {
        out = out.apply_unitary(&[target], &gates::pauli_z())?;
    }
    Ok(out)
}

/// Teleports `payload` through `epr` and applies the correction.
pub fn teleport<R: Rng + ?Sized>(
    payload_state: &QuantumState,
    payload: &str,
    epr: &QuantumState,
    rng: &mut R,
) -> Result<Teleported, QStateError> {
    let t = teleport_uncorrected(payload_state, payload, epr, rng)?;
    let remote = teleport_correction(&t.remote, &epr.labels()[1], t.bits)?;
    Ok(Teleported { bits: t.bits, remote })
}

#[derive(Clone, Debug)]
pub struct MemoryBoundOutcome {
    /// Registers that were measured, in state order.
    pub measured: Vec<String>,
    pub classical_bits: BitString,
    pub retained: QuantumState,
}

/// Measures every register outside `keep` in the computational basis and
/// discards it; at most `bound` qubits survive.
pub fn enforce_memory_bound<R: Rng + ?Sized>(
    state: &QuantumState,
    keep: &[&str],
    bound: usize,
    rng: &mut R,
) -> Result<MemoryBoundOutcome, QStateError> {
    if keep.len() > bound {
        return Err(QStateError::MemoryBoundExceeded { keep: keep.len(), bound });
    }
    state.positions(keep)?;
    let measured: Vec<String> = state.labels().iter().filter(|l| !keep.contains(&l.as_str())).cloned().collect();
    if measured.is_empty() {
        return Ok(MemoryBoundOutcome { measured, classical_bits: BitString::zeros(0), retained: state.clone() });
    }
    let targets: Vec<&str> = measured.iter().map(String::as_str).collect();
    let bases = BasisString::uniform(targets.len(), Basis::Computational);
    let (bits, collapsed) = state.measure(&targets, &bases, rng)?;
    let positions = collapsed.positions(&targets)?;
    let retained = collapsed.drop_collapsed(&positions, &bits);
    Ok(MemoryBoundOutcome { measured, classical_bits: bits, retained })
}

#[cfg(test)]
mod tests;
