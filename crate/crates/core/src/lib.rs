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

//! Simulator for a Bell-state arbitrated quantum signature scheme, with
//! executable attacks on it and the optical countermeasures against them.

pub mod adversary;
pub mod cli;
pub mod defense;
pub mod numfmt;
pub mod pool;
pub mod protocol;
pub mod qotp;
pub mod runner;
pub mod statevector;
