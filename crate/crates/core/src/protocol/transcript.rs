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
use serde_json::value::{to_raw_value, RawValue};

use super::arbiter::Verdict;
use super::board::{BoardEntry, PublicBoard};
use super::steps::VerifyOutcome;
use crate::numfmt::Decimal17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Actor {
    Alice,
    Bob,
    Trent,
    Eve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Setup,
    Send,
    Measure,
    Decision,
    BoardPost,
    TrentRecord,
    Claim,
    Attack,
    DefenseAlarm,
    Verdict,
}

impl EventKind {
    /// Kinds that record what happened on the protocol's own channels, as
    /// opposed to attack bookkeeping, claims and rulings.
    pub fn is_protocol_phase(self) -> bool {
        matches!(
            self,
            EventKind::Setup
                | EventKind::Send
                | EventKind::Measure
                | EventKind::Decision
                | EventKind::BoardPost
                | EventKind::TrentRecord
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Event {
    pub t: usize,
    pub actor: Actor,
    pub kind: EventKind,
    pub payload: Box<RawValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranscriptConfig {
    pub scenario: String,
    pub n: usize,
    pub seed: u64,
    pub trial: u64,
    pub defenses: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    /// Stopped at the teleport comparison, before `r` was requested.
    AbortedPrePublication,
    /// A defense device raised an alarm; no verdict is issued.
    AttackDetected,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Checks {
    #[serde(rename = "V")]
    pub v: Option<bool>,
    pub v5: Option<VerifyOutcome>,
    pub recover_fidelity_min: Option<Decimal17>,
    pub signature_valid: Option<bool>,
}

/// Append-only log of one run.
#[derive(Clone, Debug, Serialize)]
pub struct Transcript {
    pub config: TranscriptConfig,
    events: Vec<Event>,
    board: Vec<BoardEntry>,
    pub verdict: Option<Verdict>,
    pub status: RunStatus,
    pub checks: Checks,
}

#[derive(Serialize)]
struct ProtocolEvent<'a> {
    actor: Actor,
    kind: EventKind,
    payload: &'a RawValue,
}

#[derive(Serialize)]
struct ProtocolView<'a> {
    events: Vec<ProtocolEvent<'a>>,
    board: &'a [BoardEntry],
}

impl Transcript {
    pub fn new(config: TranscriptConfig) -> Self {
        Transcript {
            config,
            events: Vec::new(),
            board: Vec::new(),
            verdict: None,
            status: RunStatus::Completed,
            checks: Checks::default(),
        }
    }

    pub fn push<P: Serialize + ?Sized>(&mut self, actor: Actor, kind: EventKind, payload: &P) {
        let payload = to_raw_value(payload).expect("event payloads serialize to JSON");
        self.events.push(Event {
            t: self.events.len(),
            actor,
            kind,
            payload,
        });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn set_board(&mut self, board: &PublicBoard) {
        self.board = board.entries().to_vec();
    }

    pub fn board(&self) -> &[BoardEntry] {
        &self.board
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serialization is infallible")
    }

    /// Protocol-phase events (without their sequence numbers) and the board:
    /// the run as seen on the protocol's own channels.
    pub fn protocol_view(&self) -> String {
        let view = ProtocolView {
            events: self
                .events
                .iter()
                .filter(|e| e.kind.is_protocol_phase())
                .map(|e| ProtocolEvent {
                    actor: e.actor,
                    kind: e.kind,
                    payload: &e.payload,
                })
                .collect(),
            board: &self.board,
        };
        serde_json::to_string(&view).expect("view serialization is infallible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn config() -> TranscriptConfig {
        TranscriptConfig {
            scenario: "honest".into(),
            n: 1,
            seed: 3,
            trial: 0,
            defenses: vec![],
        }
    }

    #[test]
    fn schema_field_order() {
        let mut t = Transcript::new(config());
        t.push(Actor::Alice, EventKind::Send, &json!({"x": 1}));
        t.push(Actor::Eve, EventKind::Attack, &json!({"y": 2}));
        let s = t.to_json();
        assert!(s.starts_with(r#"{"config":{"scenario":"honest","n":1,"seed":3,"trial":0,"defenses":[]},"events":[{"t":0,"actor":"Alice","kind":"send","payload":{"x":1}}"#));
        let keys = ["\"events\"", "\"board\"", "\"verdict\"", "\"status\"", "\"checks\""];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(s.ends_with(r#""checks":{"V":null,"v5":null,"recover_fidelity_min":null,"signature_valid":null}}"#));
    }

    #[test]
    fn protocol_view_skips_attack_bookkeeping() {
        let mut a = Transcript::new(config());
        a.push(Actor::Alice, EventKind::Send, &json!({"x": 1}));
        let mut b = Transcript::new(TranscriptConfig {
            scenario: "other".into(),
            ..config()
        });
        b.push(Actor::Alice, EventKind::Attack, &json!({"secret": true}));
        b.push(Actor::Alice, EventKind::Send, &json!({"x": 1}));
        assert_eq!(a.protocol_view(), b.protocol_view());
        assert_ne!(a.to_json(), b.to_json());
    }
}
