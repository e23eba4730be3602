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

use num_complex::Complex64;
use rand::Rng;

use super::ProtocolError;
use crate::qotp::QubitSequence;
use crate::statevector::{Amplitude, StateError, INPUT_NORM_TOLERANCE};

/// Largest Bloch-vector component a generic message qubit may have.
///
/// A qubit whose Bloch components all stay below this bound is far from
/// every Pauli eigenstate, so any non-identity Pauli moves it to a state at
/// fidelity at most `0.95² ≈ 0.90` from itself.
pub const GENERIC_BLOCH_BOUND: f64 = 0.95;

/// Alice's classical description of the message `|P⟩ = ⊗ (α_i|0⟩ + β_i|1⟩)`.
///
/// Knowing the coefficients is what lets Alice prepare the three copies the
/// protocol consumes without cloning.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageSpec {
    coefficients: Vec<(Amplitude, Amplitude)>,
}

impl MessageSpec {
    pub fn new(coefficients: Vec<(Amplitude, Amplitude)>) -> Result<Self, ProtocolError> {
        if coefficients.is_empty() {
            return Err(ProtocolError::EmptyMessage);
        }
        for &(a, b) in &coefficients {
            let norm = a.norm_sqr() + b.norm_sqr();
            if (norm - 1.0).abs() > INPUT_NORM_TOLERANCE {
                return Err(StateError::NotNormalized(norm).into());
            }
        }
        Ok(MessageSpec { coefficients })
    }

    /// Haar-random qubits.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, ProtocolError> {
        MessageSpec::new((0..n).map(|_| haar_qubit(rng)).collect())
    }

    /// Haar-random qubits, resampled until each is generic (see
    /// [`GENERIC_BLOCH_BOUND`]).
    pub fn random_generic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, ProtocolError> {
        let qubits = (0..n)
            .map(|_| loop {
                let q = haar_qubit(rng);
                if is_generic(q) {
                    break q;
                }
            })
            .collect();
        MessageSpec::new(qubits)
    }

    /// Reads the coefficients back out of a product sequence.
    pub fn from_sequence(seq: &QubitSequence) -> Result<Self, ProtocolError> {
        MessageSpec::new(
            seq.iter()
                .map(|q| (q.amplitudes()[0], q.amplitudes()[1]))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[(Amplitude, Amplitude)] {
        &self.coefficients
    }

    /// A fresh copy of `|P⟩` with qubits labeled `prefix_1 … prefix_n`.
    pub fn prepare(&self, prefix: &str) -> QubitSequence {
        QubitSequence::from_amplitudes(&self.coefficients, prefix).expect("coefficients validated at construction")
    }

    pub fn is_generic(&self) -> bool {
        self.coefficients.iter().all(|&q| is_generic(q))
    }
}

fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> (Amplitude, Amplitude) {
    let u: f64 = rng.random();
    let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let global: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    (
        Complex64::from_polar(u.sqrt(), global),
        Complex64::from_polar((1.0 - u).sqrt(), global + phase),
    )
}

/// Bloch vector `(x, y, z)` of `α|0⟩ + β|1⟩`.
pub(crate) fn bloch((a, b): (Amplitude, Amplitude)) -> [f64; 3] {
    let cross = a.conj() * b;
    [2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()]
}

fn is_generic(q: (Amplitude, Amplitude)) -> bool {
    bloch(q).iter().all(|c| c.abs() <= GENERIC_BLOCH_BOUND)
}
