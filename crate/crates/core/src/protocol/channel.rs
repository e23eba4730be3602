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

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::ProtocolError;
use crate::pool::QubitPool;
use crate::qotp::KeyBits;
use crate::statevector::{Label, PureState};

/// Wavelength tag of a photon. Honest parties only emit and register
/// `Signal` photons; their encoders still act on anything in the slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Band {
    Signal,
    OffBand,
}

/// One photon on a channel, carrying a qubit that lives in the [`Lab`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Carrier {
    pub id: u64,
    pub band: Band,
    pub time_slot: u32,
    pub qubit: Label,
}

/// All qubits of one run plus the carrier id counter.
#[derive(Debug, Default)]
pub struct Lab {
    pool: QubitPool,
    next_carrier: u64,
}

impl Lab {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pool(&self) -> &QubitPool {
        &self.pool
    }

    pub fn pool_mut(&mut self) -> &mut QubitPool {
        &mut self.pool
    }

    /// Wraps a live qubit in a new carrier.
    pub fn emit(&mut self, qubit: Label, band: Band, time_slot: u32) -> Carrier {
        let id = self.next_carrier;
        self.next_carrier += 1;
        Carrier {
            id,
            band,
            time_slot,
            qubit,
        }
    }

    pub fn qubit(&self, label: &Label) -> Result<PureState, ProtocolError> {
        Ok(self.pool.qubit(label)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadDirection {
    Encrypt,
    Decrypt,
}

/// A keyed Pauli encoder: every carrier in time slot `t` receives the pad
/// Pauli for position `t` (key bits `2t`, `2t+1`), whatever its band.
///
/// Over a stream with one signal photon per slot `0..m` this is exactly the
/// one-time pad over the `m`-qubit sequence.
pub fn apply_slot_pad(lab: &mut Lab, stream: &[Carrier], key: &KeyBits, direction: PadDirection) -> Result<(), ProtocolError> {
    for c in stream {
        let p = key.pauli(c.time_slot as usize)?;
        match direction {
            PadDirection::Encrypt => lab.pool.apply_pauli(&c.qubit, p)?,
            PadDirection::Decrypt => lab.pool.apply_pauli_inverse(&c.qubit, p)?,
        }
    }
    Ok(())
}

/// What an honest receiver registers: the first signal photon of each slot,
/// in slot order. Slots must run contiguously from 0.
pub fn signal_per_slot(stream: &[Carrier]) -> Result<Vec<Carrier>, ProtocolError> {
    let mut picked: Vec<Carrier> = Vec::new();
    for c in stream.iter().filter(|c| c.band == Band::Signal) {
        if !picked.iter().any(|p| p.time_slot == c.time_slot) {
            picked.push(c.clone());
        }
    }
    picked.sort_by_key(|c| c.time_slot);
    for (i, c) in picked.iter().enumerate() {
        if c.time_slot as usize != i {
            return Err(ProtocolError::MalformedStream(format!("no signal photon in slot {i}")));
        }
    }
    Ok(picked)
}

/// SHA-256 over the slot-tagged canonical states of `stream`.
pub fn stream_digest(lab: &Lab, stream: &[Carrier]) -> Result<String, ProtocolError> {
    let mut hasher = Sha256::new();
    for c in stream {
        let state = lab.qubit(&c.qubit)?;
        hasher.update(format!("{}:{}\n", c.time_slot, state.canonical_string()).as_bytes());
    }
    Ok(hex::encode(hasher.finalize()))
}
