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

//! Python module `aqs`: qubit states, the Pauli one-time pad, and seeded
//! protocol trials.
//!
//! Keys cross the boundary as bit strings (`"0110"`), Bell outcomes as the
//! names `PhiPlus`, `PhiMinus`, `PsiPlus`, `PsiMinus`, transcripts as JSON.

use aqs_core::adversary::Scenario;
use aqs_core::cli::{self, Format, RunConfig};
use aqs_core::defense::DefenseConfig;
use aqs_core::qotp::{self, KeyBits, KeyRole, QubitSequence};
use aqs_core::runner::{run_trial as core_run_trial, TrialSpec};
use aqs_core::statevector::{self as sv, BellOutcome, Label, PauliBits};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn outcome_name(o: BellOutcome) -> &'static str {
    match o {
        BellOutcome::PhiPlus => "PhiPlus",
        BellOutcome::PhiMinus => "PhiMinus",
        BellOutcome::PsiPlus => "PsiPlus",
        BellOutcome::PsiMinus => "PsiMinus",
    }
}

fn parse_outcome(name: &str) -> PyResult<BellOutcome> {
    BellOutcome::ALL
        .into_iter()
        .find(|&o| outcome_name(o) == name)
        .ok_or_else(|| err(format!("unknown Bell outcome `{name}`")))
}

fn key(bits: &str) -> PyResult<KeyBits> {
    KeyBits::from_bit_str(bits, KeyRole::Shared).map_err(err)
}

/// Normalized pure state on labeled qubits.
#[pyclass(name = "PureState", module = "aqs", frozen, from_py_object)]
#[derive(Clone)]
struct PyPureState(sv::PureState);

#[pymethods]
impl PyPureState {
    #[new]
    fn new(labels: Vec<String>, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let labels = labels.into_iter().map(Label::new).collect();
        sv::PureState::new(labels, amplitudes).map(Self).map_err(err)
    }

    #[staticmethod]
    fn qubit(alpha: Complex64, beta: Complex64, label: &str) -> PyResult<Self> {
        sv::PureState::make_qubit(alpha, beta, label).map(Self).map_err(err)
    }

    #[staticmethod]
    fn bell_pair(a: &str, b: &str) -> PyResult<Self> {
        sv::PureState::make_bell_pair(a, b).map(Self).map_err(err)
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().iter().map(|l| l.as_str().to_owned()).collect()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn tensor(&self, other: &Self) -> PyResult<Self> {
        self.0.tensor(&other.0).map(Self).map_err(err)
    }

    fn apply_pauli(&self, label: &str, x: bool, z: bool) -> PyResult<Self> {
        self.0.apply_pauli(&Label::new(label), PauliBits::new(x, z)).map(Self).map_err(err)
    }

    /// Probabilities of (PhiPlus, PhiMinus, PsiPlus, PsiMinus).
    fn bell_probabilities(&self, first: &str, second: &str) -> PyResult<[f64; 4]> {
        self.0.bell_probabilities(&Label::new(first), &Label::new(second)).map_err(err)
    }

    /// Post-selects `outcome` and returns the residual state.
    fn bell_measure_forced(&self, first: &str, second: &str, outcome: &str) -> PyResult<Self> {
        let (_, rest) = self
            .0
            .bell_measure_forced(&Label::new(first), &Label::new(second), parse_outcome(outcome)?)
            .map_err(err)?;
        Ok(Self(rest))
    }

    fn fidelity(&self, other: &Self) -> PyResult<f64> {
        self.0.fidelity(&other.0).map_err(err)
    }

    #[pyo3(signature = (other, tol = 1e-9))]
    fn equal_up_to_phase(&self, other: &Self, tol: f64) -> PyResult<bool> {
        self.0.equal_up_to_phase(&other.0, tol).map_err(err)
    }

    fn canonical_string(&self) -> String {
        self.0.canonical_string()
    }

    fn __repr__(&self) -> String {
        format!("PureState({})", self.0.canonical_string())
    }
}

fn sequence(states: Vec<PyPureState>) -> PyResult<QubitSequence> {
    QubitSequence::new(states.into_iter().map(|s| s.0).collect()).map_err(err)
}

fn unwrap_sequence(seq: QubitSequence) -> Vec<PyPureState> {
    seq.into_inner().into_iter().map(PyPureState).collect()
}

/// Pauli one-time pad: qubit `i` gets `σ_x^{k[2i]} σ_z^{k[2i+1]}`.
#[pyfunction]
fn encrypt(states: Vec<PyPureState>, key_bits: &str) -> PyResult<Vec<PyPureState>> {
    qotp::encrypt(&sequence(states)?, &key(key_bits)?).map(unwrap_sequence).map_err(err)
}

#[pyfunction]
fn decrypt(states: Vec<PyPureState>, key_bits: &str) -> PyResult<Vec<PyPureState>> {
    qotp::decrypt(&sequence(states)?, &key(key_bits)?).map(unwrap_sequence).map_err(err)
}

/// `(x, z)` Pauli exponents that undo a teleportation with this outcome.
#[pyfunction]
fn teleport_correction(outcome: &str) -> PyResult<(bool, bool)> {
    let p = sv::teleport_correction(parse_outcome(outcome)?);
    Ok((p.x, p.z))
}

/// Result of one seeded trial.
#[pyclass(name = "TrialResult", module = "aqs", frozen, get_all)]
struct PyTrialResult {
    status: String,
    v: Option<bool>,
    comparison: Option<String>,
    verdict: Option<String>,
    recover_fidelity_min: Option<f64>,
    signature_valid: Option<bool>,
    alarms: usize,
    extraction_exact: Option<bool>,
    trent_record: Option<String>,
    transcript: String,
}

#[pymethods]
impl PyTrialResult {
    fn __repr__(&self) -> String {
        format!(
            "TrialResult(status={:?}, v={:?}, comparison={:?}, verdict={:?})",
            self.status, self.v, self.comparison, self.verdict
        )
    }
}

fn json_name<T: serde::Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn scenario(name: &str, indices: &[usize]) -> PyResult<Scenario> {
    Scenario::from_name(name, indices).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (scenario_name, n, seed, trial = 0, defenses = "", indices = vec![1]))]
fn run_trial(
    scenario_name: &str,
    n: usize,
    seed: u64,
    trial: u64,
    defenses: &str,
    indices: Vec<usize>,
) -> PyResult<PyTrialResult> {
    let spec = TrialSpec {
        scenario: scenario(scenario_name, &indices)?,
        n,
        seed,
        trial,
        defenses: DefenseConfig::parse(defenses).map_err(err)?,
    };
    let report = core_run_trial(&spec).map_err(err)?;
    let o = &report.outcome;
    Ok(PyTrialResult {
        status: json_name(&o.status),
        v: o.v,
        comparison: o.v5.as_ref().map(json_name),
        verdict: o.verdict.as_ref().map(json_name),
        recover_fidelity_min: o.recover_fidelity_min(),
        signature_valid: o.signature_valid,
        alarms: o.alarms.len(),
        extraction_exact: o.extraction.as_ref().map(|e| e.is_exact()),
        trent_record: o.trent_record.as_ref().map(|r| r.to_canonical_json()),
        transcript: report.transcript.to_json(),
    })
}

/// Runs a batch and returns `(summary_json, transcripts_json)`.
#[pyfunction]
#[pyo3(signature = (scenario_name, n, trials, seed, defenses = "", indices = vec![1]))]
fn run_batch(
    scenario_name: &str,
    n: usize,
    trials: usize,
    seed: u64,
    defenses: &str,
    indices: Vec<usize>,
) -> PyResult<(String, String)> {
    if n == 0 || trials == 0 {
        return Err(err("n and trials must be at least 1"));
    }
    let config = RunConfig {
        scenario: scenario(scenario_name, &indices)?,
        n,
        trials,
        seed,
        defenses: DefenseConfig::parse(defenses).map_err(err)?,
        out: None,
        format: Format::Json,
    };
    let batch = cli::run_batch(&config).map_err(err)?;
    Ok((
        cli::render_summary(&batch.summary, Format::Json),
        cli::transcripts_json(&batch.transcripts),
    ))
}

#[pymodule]
fn aqs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyTrialResult>()?;
    m.add_function(wrap_pyfunction!(encrypt, m)?)?;
    m.add_function(wrap_pyfunction!(decrypt, m)?)?;
    m.add_function(wrap_pyfunction!(teleport_correction, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(run_batch, m)?)?;
    m.add("SCENARIOS", Scenario::NAMES.to_vec())?;
    Ok(())
}
