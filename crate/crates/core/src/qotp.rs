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

//! Classical-keyed quantum one-time pad.
//!
//! [`encrypt`] applies `σ_x^{K_{2i−1}} σ_z^{K_{2i}}` to qubit `i` (1-based),
//! consuming two key bits per qubit from the front of the key.
//! [`transform_m`] is the companion transform `σ_x^{K_i} σ_z^{K_{i⊕1}}`,
//! where `i ⊕ 1` is read as flipping the low bit of the 0-based position
//! (pairs positions 1↔2, 3↔4, ...).

use std::fmt;

use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::statevector::{Amplitude, Label, PauliBits, PureState, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QotpError {
    #[error("key of {available} bits is too short, {needed} required")]
    KeyTooShort { needed: usize, available: usize },
    #[error("sequence element {index} spans {qubits} qubits, expected 1")]
    NotSingleQubit { index: usize, qubits: usize },
    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("malformed key: {0}")]
    MalformedKey(String),
    #[error("pad length must be at least one qubit")]
    EmptyPad,
    #[error(transparent)]
    State(#[from] StateError),
}

/// Which secret a key plays in the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KeyRole {
    /// Alice–Trent key.
    Alice,
    /// Bob–Trent key.
    Bob,
    /// Alice's random pad `r`.
    Pad,
    /// Alice–Bob key; generated at setup and never consumed.
    Shared,
}

impl KeyRole {
    pub fn as_str(self) -> &'static str {
        match self {
            KeyRole::Alice => "K_A",
            KeyRole::Bob => "K_B",
            KeyRole::Pad => "r",
            KeyRole::Shared => "K_AB",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KeyBits {
    bits: Vec<bool>,
    role: KeyRole,
}

impl KeyBits {
    pub fn new(bits: Vec<bool>, role: KeyRole) -> Self {
        KeyBits { bits, role }
    }

    pub fn zeros(len: usize, role: KeyRole) -> Self {
        KeyBits::new(vec![false; len], role)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, role: KeyRole, rng: &mut R) -> Self {
        KeyBits::new((0..len).map(|_| rng.random::<bool>()).collect(), role)
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bit_str(s: &str, role: KeyRole) -> Result<Self, QotpError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(QotpError::MalformedKey(format!("unexpected character `{other}`"))),
            })
            .collect::<Result<_, _>>()?;
        Ok(KeyBits::new(bits, role))
    }

    /// Hex with big-endian bit order, zero-padded to a byte boundary.
    pub fn to_hex(&self) -> String {
        let bytes: Vec<u8> = self
            .bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i)))
            })
            .collect();
        hex::encode(bytes)
    }

    pub fn from_hex(s: &str, len: usize, role: KeyRole) -> Result<Self, QotpError> {
        let bytes = hex::decode(s).map_err(|e| QotpError::MalformedKey(e.to_string()))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(QotpError::MalformedKey(format!(
                "{} hex bytes cannot carry {len} bits",
                bytes.len()
            )));
        }
        let bits = (0..len).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect();
        Ok(KeyBits::new(bits, role))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn role(&self) -> KeyRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Pauli for 0-based position `i` under the pad: bits `2i`, `2i+1`.
    pub fn pauli(&self, i: usize) -> Result<PauliBits, QotpError> {
        self.require(2 * i + 2)?;
        Ok(PauliBits::new(self.bits[2 * i], self.bits[2 * i + 1]))
    }

    /// First `2n` bits as a new key with the same role.
    pub fn prefix(&self, len: usize) -> Result<KeyBits, QotpError> {
        self.require(len)?;
        Ok(KeyBits::new(self.bits[..len].to_vec(), self.role))
    }

    fn require(&self, needed: usize) -> Result<(), QotpError> {
        if self.bits.len() < needed {
            return Err(QotpError::KeyTooShort {
                needed,
                available: self.bits.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for KeyBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for KeyBits {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("KeyBits", 3)?;
        s.serialize_field("role", self.role.as_str())?;
        s.serialize_field("len", &self.bits.len())?;
        s.serialize_field("hex", &self.to_hex())?;
        s.end()
    }
}

/// Ordered product of single-qubit states.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct QubitSequence(Vec<PureState>);

impl QubitSequence {
    pub fn new(qubits: Vec<PureState>) -> Result<Self, QotpError> {
        if let Some((index, q)) = qubits.iter().enumerate().find(|(_, q)| q.num_qubits() != 1) {
            return Err(QotpError::NotSingleQubit {
                index,
                qubits: q.num_qubits(),
            });
        }
        Ok(QubitSequence(qubits))
    }

    /// Builds `prefix_1 … prefix_n` from `(α, β)` pairs.
    pub fn from_amplitudes(pairs: &[(Amplitude, Amplitude)], prefix: &str) -> Result<Self, QotpError> {
        let qubits = pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| PureState::make_qubit(a, b, Label::indexed(prefix, i + 1)))
            .collect::<Result<_, _>>()?;
        Ok(QubitSequence(qubits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PureState> {
        self.0.iter()
    }

    pub fn get(&self, i: usize) -> Option<&PureState> {
        self.0.get(i)
    }

    pub fn as_slice(&self) -> &[PureState] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<PureState> {
        self.0
    }

    /// Concatenation `self ‖ other`, treated as one longer sequence.
    pub fn concat(&self, other: &QubitSequence) -> QubitSequence {
        QubitSequence(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    /// Renames qubit `i` to `prefix_{i+1}`.
    pub fn relabeled(&self, prefix: &str) -> QubitSequence {
        QubitSequence(
            self.0
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    q.relabeled(vec![Label::indexed(prefix, i + 1)])
                        .expect("single-qubit relabel")
                })
                .collect(),
        )
    }

    fn check_len(&self, other: &QubitSequence) -> Result<(), QotpError> {
        if self.len() != other.len() {
            return Err(QotpError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// Position-wise up-to-phase comparison, ignoring qubit labels.
    pub fn matches_up_to_phase(&self, other: &QubitSequence, tol: f64) -> Result<Vec<bool>, QotpError> {
        self.check_len(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let b = b.relabeled(a.labels().to_vec())?;
                Ok(a.equal_up_to_phase(&b, tol)?)
            })
            .collect()
    }

    /// Position-wise fidelities, ignoring qubit labels.
    pub fn fidelities(&self, other: &QubitSequence) -> Result<Vec<f64>, QotpError> {
        self.check_len(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let b = b.relabeled(a.labels().to_vec())?;
                Ok(a.fidelity(&b)?)
            })
            .collect()
    }
}

fn map_qubits(
    seq: &QubitSequence,
    mut f: impl FnMut(usize, &PureState) -> Result<PureState, QotpError>,
) -> Result<QubitSequence, QotpError> {
    seq.iter()
        .enumerate()
        .map(|(i, q)| f(i, q))
        .collect::<Result<_, _>>()
        .map(QubitSequence)
}

fn only_label(q: &PureState) -> &Label {
    &q.labels()[0]
}

/// Quantum one-time-pad encryption of `seq` under the first `2n` bits of `key`.
pub fn encrypt(seq: &QubitSequence, key: &KeyBits) -> Result<QubitSequence, QotpError> {
    key.require(2 * seq.len())?;
    map_qubits(seq, |i, q| Ok(q.apply_pauli(only_label(q), key.pauli(i)?)?))
}

/// Exact inverse of [`encrypt`], phase included.
pub fn decrypt(seq: &QubitSequence, key: &KeyBits) -> Result<QubitSequence, QotpError> {
    key.require(2 * seq.len())?;
    map_qubits(seq, |i, q| Ok(q.apply_pauli_inverse(only_label(q), key.pauli(i)?)?))
}

/// Key positions `(x, z)` that [`transform_m`] reads for 0-based qubit `i`.
pub fn transform_m_indices(i: usize) -> (usize, usize) {
    (i, i ^ 1)
}

/// Key bits [`transform_m`] needs for an `n`-qubit sequence.
pub fn transform_m_key_len(n: usize) -> usize {
    (0..n)
        .map(|i| {
            let (x, z) = transform_m_indices(i);
            x.max(z) + 1
        })
        .max()
        .unwrap_or(0)
}

pub fn transform_m(seq: &QubitSequence, key: &KeyBits) -> Result<QubitSequence, QotpError> {
    key.require(transform_m_key_len(seq.len()))?;
    map_qubits(seq, |i, q| {
        let (x, z) = transform_m_indices(i);
        let p = PauliBits::new(key.bits[x], key.bits[z]);
        Ok(q.apply_pauli(only_label(q), p)?)
    })
}

/// Uniform pad `r ∈ {00, 01, 10, 11}^n`.
pub fn gen_pad_r<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<KeyBits, QotpError> {
    if n == 0 {
        return Err(QotpError::EmptyPad);
    }
    Ok(KeyBits::random(2 * n, KeyRole::Pad, rng))
}
