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

//! Fixed-precision float rendering for transcripts.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `x` as a decimal with 17 significant digits, in scientific notation.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes an `f64` as a JSON number with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decimal17(pub f64);

impl Serialize for Decimal17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom("non-finite float in transcript"));
        }
        RawValue::from_string(sig17(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer)
    }
}
