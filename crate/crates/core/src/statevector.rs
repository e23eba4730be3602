// Copyright 2026 The AQS Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact state-vector algebra for registers of at most four labeled qubits.
//!
//! Amplitude index order follows label order: the first label is the most
//! significant bit of the basis index, so over `(a, b)` the amplitudes are
//! ordered `|00⟩, |01⟩, |10⟩, |11⟩`.
//!
//! Pauli operators are encoded as [`PauliBits`] `(x, z)` meaning
//! `σ_x^x σ_z^z`, with `σ_z` acting first. Global phase is never
//! significant; equality between states is always up to a unit scalar.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numfmt::Decimal17;

/// A probability amplitude.
pub type Amplitude = Complex64;

/// Largest register the simulator will hold in one group.
pub const MAX_QUBITS: usize = 4;

/// Norm drift tolerated after any operation.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Normalization tolerance accepted from callers constructing states.
pub const INPUT_NORM_TOLERANCE: f64 = 1e-9;

/// Projection probabilities below this are treated as zero.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-15;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("amplitudes are not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(Label),
    #[error("qubit label `{0}` is present in both operands")]
    LabelCollision(Label),
    #[error("unknown qubit label `{0}`")]
    UnknownLabel(Label),
    #[error("states are defined over different label sets")]
    LabelMismatch,
    #[error("register of {0} qubits exceeds the {MAX_QUBITS}-qubit cap")]
    TooManyQubits(usize),
    #[error("amplitude vector of length {len} does not fit {qubits} qubits")]
    BadDimension { len: usize, qubits: usize },
    #[error("amplitude is not finite")]
    NonFinite,
    #[error("every Bell-projection probability vanishes")]
    DegenerateState,
    #[error("forced outcome {outcome} has probability {probability:e}")]
    ImpossibleOutcome {
        outcome: BellOutcome,
        probability: f64,
    },
    #[error("qubit `{0}` is entangled with other qubits")]
    Entangled(Label),
}

pub type Result<T, E = StateError> = std::result::Result<T, E>;

/// Opaque qubit label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    /// Label `<prefix>_<index>`, the naming scheme used for qubit families.
    pub fn indexed(prefix: &str, index: usize) -> Self {
        Label(format!("{prefix}_{index}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// Exponents of the operator `σ_x^x σ_z^z`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct PauliBits {
    pub x: bool,
    pub z: bool,
}

impl PauliBits {
    pub const IDENTITY: PauliBits = PauliBits { x: false, z: false };
    pub const X: PauliBits = PauliBits { x: true, z: false };
    pub const Z: PauliBits = PauliBits { x: false, z: true };
    pub const XZ: PauliBits = PauliBits { x: true, z: true };

    pub const ALL: [PauliBits; 4] = [Self::IDENTITY, Self::Z, Self::X, Self::XZ];

    pub fn new(x: bool, z: bool) -> Self {
        PauliBits { x, z }
    }

    pub fn is_identity(self) -> bool {
        !self.x && !self.z
    }

    /// Product of two Pauli operators, ignoring phase.
    pub fn combine(self, other: PauliBits) -> PauliBits {
        PauliBits {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }
}

impl fmt::Display for PauliBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", u8::from(self.x), u8::from(self.z))
    }
}

/// Result of a Bell-basis measurement.
///
/// The `(x, z)` encoding is `Φ+ ↦ 00`, `Φ− ↦ 01`, `Ψ+ ↦ 10`, `Ψ− ↦ 11`; it is
/// both the teleportation correction and the Pauli that maps `Φ+` onto the
/// outcome's Bell state when applied to the first qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    /// Fixed variant order used for sampling.
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn bits(self) -> PauliBits {
        match self {
            BellOutcome::PhiPlus => PauliBits::IDENTITY,
            BellOutcome::PhiMinus => PauliBits::Z,
            BellOutcome::PsiPlus => PauliBits::X,
            BellOutcome::PsiMinus => PauliBits::XZ,
        }
    }

    pub fn from_bits(bits: PauliBits) -> Self {
        match (bits.x, bits.z) {
            (false, false) => BellOutcome::PhiPlus,
            (false, true) => BellOutcome::PhiMinus,
            (true, false) => BellOutcome::PsiPlus,
            (true, true) => BellOutcome::PsiMinus,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Coefficients over `|00⟩, |01⟩, |10⟩, |11⟩`.
    fn coefficients(self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        match self {
            BellOutcome::PhiPlus => [h, 0.0, 0.0, h],
            BellOutcome::PhiMinus => [h, 0.0, 0.0, -h],
            BellOutcome::PsiPlus => [0.0, h, h, 0.0],
            BellOutcome::PsiMinus => [0.0, h, -h, 0.0],
        }
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BellOutcome::PhiPlus => "Φ+",
            BellOutcome::PhiMinus => "Φ−",
            BellOutcome::PsiPlus => "Ψ+",
            BellOutcome::PsiMinus => "Ψ−",
        };
        f.write_str(s)
    }
}

/// Pauli that restores the teleported state on the receiving qubit.
pub fn teleport_correction(outcome: BellOutcome) -> PauliBits {
    outcome.bits()
}

/// How a Bell measurement picks its outcome.
pub enum Collapse<'a> {
    /// Inverse-CDF sampling over the four probabilities in [`BellOutcome::ALL`] order.
    Sample(&'a mut dyn RngCore),
    /// Post-select the given outcome; it must have non-negligible probability.
    Forced(BellOutcome),
}

/// Inverse-CDF draw over the four Bell probabilities in variant order.
pub fn sample_outcome<R: Rng + ?Sized>(probabilities: &[f64; 4], rng: &mut R) -> Result<BellOutcome> {
    let total: f64 = probabilities.iter().sum();
    if probabilities.iter().all(|&p| p < NEGLIGIBLE_PROBABILITY) {
        return Err(StateError::DegenerateState);
    }
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (outcome, &p) in BellOutcome::ALL.iter().zip(probabilities) {
        if p < NEGLIGIBLE_PROBABILITY {
            continue;
        }
        acc += p;
        last = Some(*outcome);
        if u < acc {
            return Ok(*outcome);
        }
    }
    // u landed in the rounding gap at the top of the CDF.
    last.ok_or(StateError::DegenerateState)
}

/// Normalized pure state over an ordered list of labeled qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    labels: Vec<Label>,
    amps: Vec<Amplitude>,
}

impl PureState {
    /// Builds a state, checking dimension, label uniqueness, finiteness and
    /// normalization (to [`INPUT_NORM_TOLERANCE`]).
    pub fn new(labels: Vec<Label>, amps: Vec<Amplitude>) -> Result<Self> {
        if labels.len() > MAX_QUBITS {
            return Err(StateError::TooManyQubits(labels.len()));
        }
        if amps.len() != 1 << labels.len() {
            return Err(StateError::BadDimension {
                len: amps.len(),
                qubits: labels.len(),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(StateError::DuplicateLabel(l.clone()));
            }
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > INPUT_NORM_TOLERANCE {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(PureState { labels, amps })
    }

    /// Zero-qubit state; the residual of measuring out every qubit.
    pub fn empty() -> Self {
        PureState {
            labels: Vec::new(),
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// `alpha|0⟩ + beta|1⟩`.
    pub fn make_qubit(alpha: Amplitude, beta: Amplitude, label: impl Into<Label>) -> Result<Self> {
        PureState::new(vec![label.into()], vec![alpha, beta])
    }

    /// Computational basis state `|bit⟩`.
    pub fn basis(label: impl Into<Label>, bit: bool) -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let amps = if bit { vec![zero, one] } else { vec![one, zero] };
        PureState {
            labels: vec![label.into()],
            amps,
        }
    }

    /// `(|00⟩ + |11⟩)/√2` over `(a, b)`.
    pub fn make_bell_pair(a: impl Into<Label>, b: impl Into<Label>) -> Result<Self> {
        PureState::bell_state(BellOutcome::PhiPlus, a, b)
    }

    pub fn bell_state(outcome: BellOutcome, a: impl Into<Label>, b: impl Into<Label>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(StateError::DuplicateLabel(a));
        }
        let amps = outcome
            .coefficients()
            .iter()
            .map(|&c| Complex64::new(c, 0.0))
            .collect();
        Ok(PureState {
            labels: vec![a, b],
            amps,
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.labels.contains(label)
    }

    fn position(&self, label: &Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| StateError::UnknownLabel(label.clone()))
    }

    fn mask(&self, position: usize) -> usize {
        1 << (self.labels.len() - 1 - position)
    }

    /// Outer product; labels of `other` are appended after those of `self`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        if let Some(l) = other.labels.iter().find(|l| self.labels.contains(l)) {
            return Err(StateError::LabelCollision(l.clone()));
        }
        let k = self.labels.len() + other.labels.len();
        if k > MAX_QUBITS {
            return Err(StateError::TooManyQubits(k));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(PureState { labels, amps })
    }

    /// Applies `σ_x^x σ_z^z` (σ_z first) to one qubit.
    pub fn apply_pauli(&self, label: &Label, p: PauliBits) -> Result<PureState> {
        let mask = self.mask(self.position(label)?);
        let mut amps = self.amps.clone();
        if p.z {
            phase_flip(&mut amps, mask);
        }
        if p.x {
            bit_flip(&mut amps, mask);
        }
        Ok(PureState {
            labels: self.labels.clone(),
            amps,
        })
    }

    /// Applies `(σ_x^x σ_z^z)⁻¹ = σ_z^z σ_x^x` (σ_x first); exact inverse of
    /// [`PureState::apply_pauli`] including phase.
    pub fn apply_pauli_inverse(&self, label: &Label, p: PauliBits) -> Result<PureState> {
        let mask = self.mask(self.position(label)?);
        let mut amps = self.amps.clone();
        if p.x {
            bit_flip(&mut amps, mask);
        }
        if p.z {
            phase_flip(&mut amps, mask);
        }
        Ok(PureState {
            labels: self.labels.clone(),
            amps,
        })
    }

    /// Probability of reading `1` on `label` in the computational basis.
    pub fn prob_one(&self, label: &Label) -> Result<f64> {
        let mask = self.mask(self.position(label)?);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Unnormalized residual `⟨β|_{first,second} |ψ⟩` over the remaining qubits.
    fn bell_residual(&self, first: &Label, second: &Label, outcome: BellOutcome) -> Result<(Vec<Label>, Vec<Amplitude>)> {
        let p1 = self.position(first)?;
        let p2 = self.position(second)?;
        if p1 == p2 {
            return Err(StateError::DuplicateLabel(first.clone()));
        }
        let (m1, m2) = (self.mask(p1), self.mask(p2));
        let rest: Vec<usize> = (0..self.labels.len()).filter(|&q| q != p1 && q != p2).collect();
        let coeffs = outcome.coefficients();
        let mut residual = vec![Complex64::new(0.0, 0.0); 1 << rest.len()];
        for (j, slot) in residual.iter_mut().enumerate() {
            let mut base = 0;
            for (r, &q) in rest.iter().enumerate() {
                if j & (1 << (rest.len() - 1 - r)) != 0 {
                    base |= self.mask(q);
                }
            }
            for (ab, &c) in coeffs.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let mut idx = base;
                if ab & 0b10 != 0 {
                    idx |= m1;
                }
                if ab & 0b01 != 0 {
                    idx |= m2;
                }
                *slot += self.amps[idx] * c;
            }
        }
        let labels = rest.iter().map(|&q| self.labels[q].clone()).collect();
        Ok((labels, residual))
    }

    /// Analytic probabilities of the four Bell outcomes on `(first, second)`,
    /// in [`BellOutcome::ALL`] order.
    pub fn bell_probabilities(&self, first: &Label, second: &Label) -> Result<[f64; 4]> {
        let mut probs = [0.0; 4];
        for (p, outcome) in probs.iter_mut().zip(BellOutcome::ALL) {
            let (_, residual) = self.bell_residual(first, second, outcome)?;
            *p = residual.iter().map(|a| a.norm_sqr()).sum();
        }
        Ok(probs)
    }

    /// Projects onto one Bell outcome and returns its probability and the
    /// renormalized residual with both measured labels removed.
    pub fn bell_project(&self, first: &Label, second: &Label, outcome: BellOutcome) -> Result<(f64, PureState)> {
        let (labels, mut amps) = self.bell_residual(first, second, outcome)?;
        let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if probability < NEGLIGIBLE_PROBABILITY {
            return Err(StateError::ImpossibleOutcome { outcome, probability });
        }
        let scale = probability.sqrt().recip();
        amps.iter_mut().for_each(|a| *a *= scale);
        Ok((probability, PureState { labels, amps }))
    }

    /// Bell measurement with collapse.
    pub fn bell_measure<R: Rng + ?Sized>(&self, first: &Label, second: &Label, rng: &mut R) -> Result<(BellOutcome, PureState)> {
        let probs = self.bell_probabilities(first, second)?;
        let outcome = sample_outcome(&probs, rng)?;
        let (_, residual) = self.bell_project(first, second, outcome)?;
        Ok((outcome, residual))
    }

    /// Bell measurement post-selected on `outcome`.
    pub fn bell_measure_forced(&self, first: &Label, second: &Label, outcome: BellOutcome) -> Result<(BellOutcome, PureState)> {
        let (_, residual) = self.bell_project(first, second, outcome)?;
        Ok((outcome, residual))
    }

    pub fn bell_measure_with(&self, first: &Label, second: &Label, collapse: Collapse<'_>) -> Result<(BellOutcome, PureState)> {
        match collapse {
            Collapse::Sample(rng) => self.bell_measure(first, second, rng),
            Collapse::Forced(outcome) => self.bell_measure_forced(first, second, outcome),
        }
    }

    /// Same amplitudes under new labels (positionally).
    pub fn relabeled(&self, labels: Vec<Label>) -> Result<PureState> {
        if labels.len() != self.labels.len() {
            return Err(StateError::LabelMismatch);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(StateError::DuplicateLabel(l.clone()));
            }
        }
        Ok(PureState {
            labels,
            amps: self.amps.clone(),
        })
    }

    /// Permutes qubits so that labels appear in `order`.
    pub fn reordered(&self, order: &[Label]) -> Result<PureState> {
        if order.len() != self.labels.len() {
            return Err(StateError::LabelMismatch);
        }
        let positions = order
            .iter()
            .map(|l| self.position(l).map_err(|_| StateError::LabelMismatch))
            .collect::<Result<Vec<_>>>()?;
        let k = order.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let mut old_idx = 0;
            for (new_pos, &old_pos) in positions.iter().enumerate() {
                if new_idx & (1 << (k - 1 - new_pos)) != 0 {
                    old_idx |= self.mask(old_pos);
                }
            }
            *slot = self.amps[old_idx];
        }
        Ok(PureState {
            labels: order.to_vec(),
            amps,
        })
    }

    /// `⟨self|other⟩`, with `other` first brought into `self`'s label order.
    pub fn inner(&self, other: &PureState) -> Result<Amplitude> {
        let other = other.reordered(&self.labels)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True iff `‖self − c·other‖ ≤ tol` for some unit-modulus `c`.
    pub fn equal_up_to_phase(&self, other: &PureState, tol: f64) -> Result<bool> {
        let other = other.reordered(&self.labels)?;
        let (pivot, b) = other
            .amps
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
            .expect("state has at least one amplitude");
        let a = self.amps[pivot];
        let c = if a.norm() < NEGLIGIBLE_PROBABILITY || b.norm() < NEGLIGIBLE_PROBABILITY {
            Complex64::new(1.0, 0.0)
        } else {
            let ratio = a / b;
            ratio / ratio.norm()
        };
        let dist: f64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - c * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        Ok(dist <= tol)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    /// Canonical JSON rendering: labels, then `(re, im)` pairs at 17
    /// significant digits.
    pub fn canonical_string(&self) -> String {
        serde_json::to_string(self).expect("state serialization is infallible")
    }
}

fn phase_flip(amps: &mut [Amplitude], mask: usize) {
    for (i, a) in amps.iter_mut().enumerate() {
        if i & mask != 0 {
            *a = -*a;
        }
    }
}

fn bit_flip(amps: &mut [Amplitude], mask: usize) {
    for i in 0..amps.len() {
        if i & mask == 0 {
            amps.swap(i, i | mask);
        }
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let amps: Vec<[Decimal17; 2]> = self
            .amps
            .iter()
            .map(|a| [Decimal17(a.re), Decimal17(a.im)])
            .collect();
        let mut s = serializer.serialize_struct("PureState", 2)?;
        s.serialize_field("labels", &self.labels)?;
        s.serialize_field("amplitudes", &amps)?;
        s.end()
    }
}
