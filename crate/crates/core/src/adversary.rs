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

//! Attacks on the signature scheme.
//!
//! Two families are modeled:
//!
//! * the undeniability dilemma: Bob falsely negating a valid signature
//!   ([`bob_dos_negate`]), Alice sending a wrong measurement record
//!   ([`alice_tamper_ma`]), Eve disturbing that record in flight
//!   ([`eve_disturb_ma`]), and Alice posting a false pad
//!   ([`alice_publish_false_r`]);
//! * Trojan-horse key extraction, where Alice hides one half of a `Φ+`
//!   decoy next to each `|P'⟩` photon, lets Bob's encoder act on it, captures
//!   it before Trent and Bell-measures it against the half she kept
//!   ([`ipe_inject`], [`delay_photon_inject`], [`ipe_extract`]).
//!
//! Eve only ever touches `M_A`: disturbing the quantum parts would flip
//! Trent's `V` to 0 and make her case distinguishable from the other two.

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::protocol::{Actor, Band, BobClaim, BobVerification, Carrier, Lab, ProtocolError, PublicBoard, SignaturePackage, VerifyOutcome};
use crate::qotp::{KeyBits, KeyRole};
use crate::statevector::{BellOutcome, Collapse, Label, PureState, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttackError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("attack invoked in the wrong phase: {0}")]
    InvalidPhase(&'static str),
    #[error("index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("no indices to tamper with")]
    NoIndices,
    #[error("{found} signal photons for {expected} decoys")]
    SizeMismatch { expected: usize, found: usize },
    #[error("decoy {0} did not reach the capture point")]
    MissingDecoy(usize),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A run's adversarial behaviour. Indices are 1-based message positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    Honest,
    BobLies,
    AliceTampersMa { indices: Vec<usize> },
    EveDisturbsMa { indices: Vec<usize> },
    AliceFalseR,
    IpeAttack,
    DelayPhotonAttack,
}

impl Scenario {
    pub const NAMES: [&'static str; 7] = [
        "honest",
        "bob-lies",
        "alice-tampers-ma",
        "eve-disturbs-ma",
        "alice-false-r",
        "ipe",
        "delay-photon",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Honest => "honest",
            Scenario::BobLies => "bob-lies",
            Scenario::AliceTampersMa { .. } => "alice-tampers-ma",
            Scenario::EveDisturbsMa { .. } => "eve-disturbs-ma",
            Scenario::AliceFalseR => "alice-false-r",
            Scenario::IpeAttack => "ipe",
            Scenario::DelayPhotonAttack => "delay-photon",
        }
    }

    /// `indices` is only used by the two `M_A` scenarios.
    pub fn from_name(name: &str, indices: &[usize]) -> Result<Self, AttackError> {
        Ok(match name {
            "honest" => Scenario::Honest,
            "bob-lies" => Scenario::BobLies,
            "alice-tampers-ma" => Scenario::AliceTampersMa {
                indices: indices.to_vec(),
            },
            "eve-disturbs-ma" => Scenario::EveDisturbsMa {
                indices: indices.to_vec(),
            },
            "alice-false-r" => Scenario::AliceFalseR,
            "ipe" => Scenario::IpeAttack,
            "delay-photon" => Scenario::DelayPhotonAttack,
            other => return Err(AttackError::UnknownScenario(other.to_owned())),
        })
    }

    /// Checks scenario parameters against the message length.
    pub fn validate(&self, n: usize) -> Result<(), AttackError> {
        match self {
            Scenario::AliceTampersMa { indices } | Scenario::EveDisturbsMa { indices } => check_indices(indices, n),
            _ => Ok(()),
        }
    }

    pub fn uses_decoys(&self) -> bool {
        matches!(self, Scenario::IpeAttack | Scenario::DelayPhotonAttack)
    }
}

fn check_indices(indices: &[usize], n: usize) -> Result<(), AttackError> {
    if indices.is_empty() {
        return Err(AttackError::NoIndices);
    }
    match indices.iter().find(|&&i| i == 0 || i > n) {
        Some(&index) => Err(AttackError::IndexOutOfRange { index, n }),
        None => Ok(()),
    }
}

/// Bob's false negation of a signature he verified successfully.
pub fn bob_dos_negate(verification: &BobVerification) -> Result<BobClaim, AttackError> {
    match verification.outcome {
        VerifyOutcome::MatchOk => Ok(BobClaim::DisputesComparison),
        VerifyOutcome::Reject => Err(AttackError::InvalidPhase("run never reached the teleport comparison")),
        VerifyOutcome::Mismatch => Err(AttackError::InvalidPhase("comparison already failed, nothing to negate")),
    }
}

/// Alice replaces the listed `M_A` entries with the next Bell variant.
/// `|P'⟩` and `|S_A⟩` are untouched, so Trent still sets `V = 1`.
pub fn alice_tamper_ma(package: &SignaturePackage, indices: &[usize]) -> Result<SignaturePackage, AttackError> {
    check_indices(indices, package.n())?;
    let mut out = package.clone();
    for &i in indices {
        let o = out.m_a[i - 1];
        out.m_a[i - 1] = BellOutcome::ALL[(o.index() + 1) % 4];
    }
    Ok(out)
}

/// Eve replaces the listed `M_A` entries with a uniformly chosen different
/// Bell variant.
pub fn eve_disturb_ma<R: Rng + ?Sized>(
    package: &SignaturePackage,
    indices: &[usize],
    rng: &mut R,
) -> Result<SignaturePackage, AttackError> {
    check_indices(indices, package.n())?;
    let mut out = package.clone();
    for &i in indices {
        let o = out.m_a[i - 1];
        let shift = rng.random_range(1..4);
        out.m_a[i - 1] = BellOutcome::ALL[(o.index() + shift) % 4];
    }
    Ok(out)
}

/// Alice posts a pad `r' ≠ r_true` (uniform over all such pads).
pub fn alice_publish_false_r<R: Rng + ?Sized>(board: &mut PublicBoard, r_true: &KeyBits, rng: &mut R) -> KeyBits {
    let r_false = loop {
        let candidate = KeyBits::random(r_true.len(), KeyRole::Pad, rng);
        if candidate != *r_true {
            break candidate;
        }
    };
    board.post(Actor::Alice, r_false.clone());
    r_false
}

/// Alice's Trojan-horse decoys: `Φ+` pairs `(d1_i, d2_i)`. The `d1` halves
/// travel with the signal, the `d2` halves never leave Alice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoySet {
    pairs: Vec<(Label, Label)>,
}

impl DecoySet {
    pub fn prepare(lab: &mut Lab, n: usize) -> Result<Self, AttackError> {
        let mut pairs = Vec::with_capacity(n);
        for i in 1..=n {
            let (d1, d2) = (Label::indexed("d1", i), Label::indexed("d2", i));
            lab.pool_mut().insert(PureState::make_bell_pair(d1.clone(), d2.clone())?)?;
            pairs.push((d1, d2));
        }
        Ok(DecoySet { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(Label, Label)] {
        &self.pairs
    }

    pub fn travels(&self, label: &Label) -> bool {
        self.pairs.iter().any(|(d1, _)| d1 == label)
    }
}

fn inject(lab: &mut Lab, p_prime: &[Carrier], decoys: &DecoySet, band: Band) -> Result<Vec<Carrier>, AttackError> {
    let signal: Vec<&Carrier> = p_prime.iter().filter(|c| c.band == Band::Signal).collect();
    if signal.len() != decoys.len() {
        return Err(AttackError::SizeMismatch {
            expected: decoys.len(),
            found: signal.len(),
        });
    }
    let mut out = Vec::with_capacity(2 * signal.len());
    for (c, (d1, _)) in signal.into_iter().zip(decoys.pairs()) {
        out.push(c.clone());
        out.push(lab.emit(d1.clone(), band, c.time_slot));
    }
    Ok(out)
}

/// Invisible-photon injection: an off-band `d1_i` rides in the slot of each
/// `|P'⟩` photon.
pub fn ipe_inject(lab: &mut Lab, p_prime: &[Carrier], decoys: &DecoySet) -> Result<Vec<Carrier>, AttackError> {
    inject(lab, p_prime, decoys, Band::OffBand)
}

/// Delay-photon injection: `d1_i` is an in-band photon trailing the `|P'⟩`
/// photon inside the same slot.
pub fn delay_photon_inject(lab: &mut Lab, p_prime: &[Carrier], decoys: &DecoySet) -> Result<Vec<Carrier>, AttackError> {
    inject(lab, p_prime, decoys, Band::Signal)
}

/// Splits a stream into what continues to Trent and Alice's captured decoys.
pub fn capture_decoys(stream: &[Carrier], decoys: &DecoySet) -> (Vec<Carrier>, Vec<Carrier>) {
    stream.iter().cloned().partition(|c| !decoys.travels(&c.qubit))
}

/// Bell-measures each captured `d1'_i` with `d2_i`; outcome `(x, z)` is the
/// pad Pauli Bob applied in that slot, i.e. `K_B` bits `2i−1, 2i`.
pub fn ipe_extract(lab: &mut Lab, captured: &[Carrier], decoys: &DecoySet, rng: &mut dyn RngCore) -> Result<KeyBits, AttackError> {
    let mut bits = Vec::with_capacity(2 * decoys.len());
    for (i, (d1, d2)) in decoys.pairs().iter().enumerate() {
        if !captured.iter().any(|c| &c.qubit == d1) {
            return Err(AttackError::MissingDecoy(i + 1));
        }
        let outcome = lab.pool_mut().bell_measure(d1, d2, Collapse::Sample(&mut *rng))?;
        let p = outcome.bits();
        bits.push(p.x);
        bits.push(p.z);
    }
    Ok(KeyBits::new(bits, KeyRole::Bob))
}
