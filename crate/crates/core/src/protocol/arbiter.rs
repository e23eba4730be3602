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

use crate::qotp::QubitSequence;

/// Everything Trent observes during verification.
///
/// Trent never handles `M_A`, Bob's Bell halves or Alice's pad, so none of
/// them can appear here.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrentRecord {
    pub received_digest: String,
    pub p_prime: QubitSequence,
    pub s_a: QubitSequence,
    #[serde(rename = "V")]
    pub v: bool,
    pub returned_digest: String,
}

impl TrentRecord {
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("record serialization is infallible")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum AliceClaim {
    /// The signature Bob received is valid and the posted `r` is the real pad.
    SignedHonestly,
    /// Alice denies that what Bob holds is her signed message.
    Repudiates,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BobClaim {
    /// Bob holds the signature.
    Accepts,
    /// Bob says the teleported `|P'_B⟩` differed from `|P'⟩`.
    DisputesComparison,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    /// Trent himself saw `|S_T⟩ ≠ |S_A⟩`.
    SignatureInvalid,
    /// Trent's record cannot settle the dispute.
    Inconclusive,
    NoDispute,
}

/// Trent's ruling, a pure function of his record and the two claims.
///
/// With `V = 1` every dispute concerns either the teleport comparison or the
/// published pad, and the record holds neither `M_A`, nor the `B` halves,
/// nor `r`: such disputes are inconclusive.
pub fn arbitrate(record: &TrentRecord, alice: AliceClaim, bob: BobClaim) -> Verdict {
    if !record.v {
        return Verdict::SignatureInvalid;
    }
    match (alice, bob) {
        (AliceClaim::SignedHonestly, BobClaim::DisputesComparison) => Verdict::Inconclusive,
        (AliceClaim::Repudiates, BobClaim::Accepts) => Verdict::Inconclusive,
        _ => Verdict::NoDispute,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::PureState;

    fn record(v: bool) -> TrentRecord {
        let seq = QubitSequence::new(vec![PureState::basis("p_1", false)]).unwrap();
        TrentRecord {
            received_digest: "00".into(),
            p_prime: seq.clone(),
            s_a: seq,
            v,
            returned_digest: "11".into(),
        }
    }

    #[test]
    fn verdict_table() {
        let ok = record(true);
        assert_eq!(
            arbitrate(&ok, AliceClaim::SignedHonestly, BobClaim::DisputesComparison),
            Verdict::Inconclusive
        );
        assert_eq!(arbitrate(&ok, AliceClaim::Repudiates, BobClaim::Accepts), Verdict::Inconclusive);
        assert_eq!(arbitrate(&ok, AliceClaim::SignedHonestly, BobClaim::Accepts), Verdict::NoDispute);
        assert_eq!(
            arbitrate(&ok, AliceClaim::Repudiates, BobClaim::DisputesComparison),
            Verdict::NoDispute
        );
        let bad = record(false);
        for a in [AliceClaim::SignedHonestly, AliceClaim::Repudiates] {
            for b in [BobClaim::Accepts, BobClaim::DisputesComparison] {
                assert_eq!(arbitrate(&bad, a, b), Verdict::SignatureInvalid);
            }
        }
    }

    #[test]
    fn record_json_has_fixed_field_order() {
        let json = record(true).to_canonical_json();
        let keys = ["\"received_digest\"", "\"p_prime\"", "\"s_a\"", "\"V\"", "\"returned_digest\""];
        let positions: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }
}
