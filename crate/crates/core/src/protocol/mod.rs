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

//! The three-party signature protocol: Alice signs, Bob verifies, Trent
//! arbitrates.
//!
//! Every quantum object of a run lives in a [`Lab`]; parties exchange
//! [`Carrier`]s that reference qubits in it. The step functions in
//! [`steps`] act on the lab in protocol order:
//!
//! 1. [`setup_keys`] and [`distribute_bell_pairs`] (initialization),
//! 2. [`alice_sign`] (signing, ending with the package sent to Bob),
//! 3. [`bob_forward`], [`trent_verify`], [`bob_verify_and_compare`],
//!    [`publish_r`], [`bob_recover`] (verification).
//!
//! [`verify_signature_pair`] checks a finished signature against the
//! signer's message, and [`arbitrate`] is Trent's dispute procedure.

mod arbiter;
mod board;
mod channel;
mod message;
pub mod steps;
mod transcript;

use thiserror::Error;

use crate::qotp::QotpError;
use crate::statevector::StateError;

pub use arbiter::{arbitrate, AliceClaim, BobClaim, TrentRecord, Verdict};
pub use board::{BoardEntry, PublicBoard};
pub use channel::{apply_slot_pad, signal_per_slot, stream_digest, Band, Carrier, Lab, PadDirection};
pub use message::{MessageSpec, GENERIC_BLOCH_BOUND};
pub use steps::{
    alice_sign, alice_sign_with_pad, bob_forward, bob_recover, bob_verify_and_compare, distribute_bell_pairs, publish_r,
    setup_keys, trent_verify, verify_signature_pair, AlicePrivate, BellHalves, BobVerification, KeySet, Outcomes,
    SignaturePackage, VerifyOutcome, EQUALITY_TOLERANCE,
};
pub use transcript::{Actor, Checks, Event, EventKind, RunStatus, Transcript, TranscriptConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("message must contain at least one qubit")]
    EmptyMessage,
    #[error("{what}: expected {expected}, found {found}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("malformed carrier stream: {0}")]
    MalformedStream(String),
    #[error("Bell outcome law on pair {index} is not uniform: {probabilities:?}")]
    NonUniformOutcomeLaw { index: usize, probabilities: [f64; 4] },
    #[error(transparent)]
    Qotp(#[from] QotpError),
    #[error(transparent)]
    State(#[from] StateError),
}
