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

use super::Actor;
use crate::qotp::KeyBits;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoardEntry {
    pub author: Actor,
    pub value: KeyBits,
}

/// Append-only, tamper-free broadcast medium.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PublicBoard {
    entries: Vec<BoardEntry>,
}

impl PublicBoard {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn post(&mut self, author: Actor, value: KeyBits) {
        self.entries.push(BoardEntry { author, value });
    }

    pub fn entries(&self) -> &[BoardEntry] {
        &self.entries
    }

    /// Most recent value posted by `author`.
    pub fn latest_from(&self, author: Actor) -> Option<&KeyBits> {
        self.entries.iter().rev().find(|e| e.author == author).map(|e| &e.value)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
