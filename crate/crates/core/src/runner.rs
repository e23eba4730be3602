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

//! One seeded trial of the protocol under a scenario, producing a
//! [`Transcript`] and a structured outcome.
//!
//! Randomness is split into independent ChaCha streams per purpose (keys,
//! message, pad, Alice's measurement, adversary). An attack therefore never
//! shifts the protocol's own draws: the same `(seed, trial)` gives the same
//! keys, message, pad and `M_A` under every scenario.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::adversary::{
    alice_publish_false_r, alice_tamper_ma, bob_dos_negate, capture_decoys, delay_photon_inject, eve_disturb_ma,
    ipe_extract, ipe_inject, AttackError, DecoySet, Scenario,
};
use crate::defense::{screen, Alarm, DefenseConfig};
use crate::numfmt::Decimal17;
use crate::protocol::{
    alice_sign_with_pad, arbitrate, bob_forward, bob_recover, bob_verify_and_compare, distribute_bell_pairs,
    publish_r, setup_keys, trent_verify, verify_signature_pair, Actor, AliceClaim, BobClaim, Carrier, Checks,
    EventKind, Lab, MessageSpec, Outcomes, ProtocolError, PublicBoard, RunStatus, Transcript, TranscriptConfig,
    TrentRecord, Verdict, VerifyOutcome,
};
use crate::qotp::{gen_pad_r, KeyBits, QotpError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("message length must be at least 1")]
    EmptyMessage,
    #[error("override has {found} qubits, trial has n = {expected}")]
    OverrideMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Qotp(#[from] QotpError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialSpec {
    pub scenario: Scenario,
    pub n: usize,
    pub seed: u64,
    pub trial: u64,
    pub defenses: DefenseConfig,
}

/// Replaces the message or the pad a trial would otherwise draw.
#[derive(Clone, Debug, Default)]
pub struct TrialOverrides {
    pub message: Option<MessageSpec>,
    pub pad: Option<KeyBits>,
}

/// Key bits the adversary learned, next to the bits Bob actually used on
/// the attacked slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extraction {
    pub extracted: KeyBits,
    pub consumed: KeyBits,
}

impl Extraction {
    pub fn is_exact(&self) -> bool {
        self.extracted.bits() == self.consumed.bits()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub status: RunStatus,
    pub message: MessageSpec,
    pub true_r: KeyBits,
    pub published_r: Option<KeyBits>,
    /// Largest deviation of Alice's Bell probabilities from 1/4.
    pub law_deviation: f64,
    pub v: Option<bool>,
    pub v5: Option<VerifyOutcome>,
    pub mismatched: Vec<usize>,
    pub recover_fidelities: Option<Vec<f64>>,
    pub signature_valid: Option<bool>,
    pub claims: Option<(AliceClaim, BobClaim)>,
    pub verdict: Option<Verdict>,
    pub alarms: Vec<(Actor, Alarm)>,
    pub extraction: Option<Extraction>,
    pub trent_record: Option<TrentRecord>,
}

impl TrialOutcome {
    pub fn recover_fidelity_min(&self) -> Option<f64> {
        self.recover_fidelities
            .as_ref()
            .map(|f| f.iter().copied().fold(f64::INFINITY, f64::min))
    }
}

#[derive(Clone, Debug)]
pub struct TrialReport {
    pub transcript: Transcript,
    pub outcome: TrialOutcome,
}

/// Stream `domain` of trial `trial` under master seed `seed`.
pub fn derive_rng(seed: u64, trial: u64, domain: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(trial.to_le_bytes());
    h.update(domain.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

pub fn run_trial(spec: &TrialSpec) -> Result<TrialReport, RunError> {
    run_trial_with(spec, TrialOverrides::default())
}

struct Run {
    tx: Transcript,
    outcome: TrialOutcome,
}

impl Run {
    fn screen(&mut self, defenses: &DefenseConfig, at: Actor, carriers: &[Carrier]) -> Option<Vec<Carrier>> {
        let screening = screen(defenses, carriers);
        if screening.is_clean() {
            return Some(screening.passed);
        }
        for alarm in screening.alarms {
            self.tx.push(at, EventKind::DefenseAlarm, &alarm);
            self.outcome.alarms.push((at, alarm));
        }
        self.outcome.status = RunStatus::AttackDetected;
        None
    }

    fn finish(mut self, board: &PublicBoard) -> TrialReport {
        self.tx.set_board(board);
        self.tx.status = self.outcome.status;
        self.tx.verdict = self.outcome.verdict;
        self.tx.checks = Checks {
            v: self.outcome.v,
            v5: self.outcome.v5,
            recover_fidelity_min: self.outcome.recover_fidelity_min().map(Decimal17),
            signature_valid: self.outcome.signature_valid,
        };
        TrialReport {
            transcript: self.tx,
            outcome: self.outcome,
        }
    }
}

pub fn run_trial_with(spec: &TrialSpec, overrides: TrialOverrides) -> Result<TrialReport, RunError> {
    let n = spec.n;
    if n == 0 {
        return Err(RunError::EmptyMessage);
    }
    spec.scenario.validate(n)?;
    let rng = |domain: &str| derive_rng(spec.seed, spec.trial, domain);
    let mut adversary_rng = rng("adversary");

    let message = match overrides.message {
        Some(m) if m.n() != n => return Err(RunError::OverrideMismatch { expected: n, found: m.n() }),
        Some(m) => m,
        None => MessageSpec::random_generic(n, &mut rng("message"))?,
    };
    let r = match overrides.pad {
        Some(r) if r.len() != 2 * n => return Err(RunError::OverrideMismatch { expected: n, found: r.len() / 2 }),
        Some(r) => r,
        None => gen_pad_r(n, &mut rng("pad"))?,
    };

    let tx = Transcript::new(TranscriptConfig {
        scenario: spec.scenario.name().to_owned(),
        n,
        seed: spec.seed,
        trial: spec.trial,
        defenses: spec.defenses.names(),
    });
    let mut run = Run {
        tx,
        outcome: TrialOutcome {
            status: RunStatus::Completed,
            message: message.clone(),
            true_r: r.clone(),
            published_r: None,
            law_deviation: 0.0,
            v: None,
            v5: None,
            mismatched: Vec::new(),
            recover_fidelities: None,
            signature_valid: None,
            claims: None,
            verdict: None,
            alarms: Vec::new(),
            extraction: None,
            trent_record: None,
        },
    };
    let mut board = PublicBoard::new();

    // Initialization.
    let keys = setup_keys(n, &mut rng("keys"))?;
    run.tx.push(
        Actor::Trent,
        EventKind::Setup,
        &json!({"step": "I1", "key_lengths": {"K_A": keys.k_a.len(), "K_B": keys.k_b.len(), "K_AB": keys.k_ab.len()}}),
    );
    let mut lab = Lab::new();
    let halves = distribute_bell_pairs(&mut lab, n)?;
    run.tx.push(
        Actor::Alice,
        EventKind::Send,
        &json!({"step": "I2", "to": "Bob", "bell_halves": halves.bob}),
    );

    // Signing.
    let mut measure_rng = rng("measure");
    let (mut package, private) = alice_sign_with_pad(
        &mut lab,
        &message,
        &keys.k_a,
        &halves.alice,
        r,
        Outcomes::Sample(&mut measure_rng),
    )?;
    run.outcome.law_deviation = private
        .outcome_probabilities
        .iter()
        .flatten()
        .map(|p| (p - 0.25).abs())
        .fold(0.0, f64::max);
    run.tx.push(Actor::Alice, EventKind::Measure, &json!({"step": "S4", "m_a": private.measured}));

    let mut decoys = None;
    match &spec.scenario {
        Scenario::AliceTampersMa { indices } => {
            package = alice_tamper_ma(&package, indices)?;
            run.tx.push(
                Actor::Alice,
                EventKind::Attack,
                &json!({"attack": "tamper-m_a", "indices": indices, "m_a": package.m_a}),
            );
        }
        Scenario::IpeAttack | Scenario::DelayPhotonAttack => {
            let d = DecoySet::prepare(&mut lab, n)?;
            let (stream, name) = if spec.scenario == Scenario::IpeAttack {
                (ipe_inject(&mut lab, &package.p_prime, &d)?, "ipe-inject")
            } else {
                (delay_photon_inject(&mut lab, &package.p_prime, &d)?, "delay-photon-inject")
            };
            package.p_prime = stream;
            run.tx.push(
                Actor::Alice,
                EventKind::Attack,
                &json!({"attack": name, "decoys": d.pairs().iter().map(|(d1, _)| d1).collect::<Vec<_>>()}),
            );
            decoys = Some(d);
        }
        _ => {}
    }
    run.tx.push(
        Actor::Alice,
        EventKind::Send,
        &json!({"step": "S5", "to": "Bob", "p_prime": package.p_prime, "s_a": package.s_a, "m_a": package.m_a}),
    );
    if let Scenario::EveDisturbsMa { indices } = &spec.scenario {
        package = eve_disturb_ma(&package, indices, &mut adversary_rng)?;
        run.tx.push(
            Actor::Eve,
            EventKind::Attack,
            &json!({"attack": "disturb-m_a", "indices": indices, "m_a": package.m_a}),
        );
    }

    // Verification.
    let Some(p_prime) = run.screen(&spec.defenses, Actor::Bob, &package.p_prime) else {
        return Ok(run.finish(&board));
    };
    let Some(s_a) = run.screen(&spec.defenses, Actor::Bob, &package.s_a) else {
        return Ok(run.finish(&board));
    };
    package.p_prime = p_prime;
    package.s_a = s_a;

    let mut y_b = bob_forward(&mut lab, &package, &keys.k_b)?;
    run.tx.push(Actor::Bob, EventKind::Send, &json!({"step": "V1", "to": "Trent", "carriers": y_b}));
    if let Some(d) = &decoys {
        let (rest, captured) = capture_decoys(&y_b, d);
        let extracted = ipe_extract(&mut lab, &captured, d, &mut adversary_rng)?;
        let consumed = keys.k_b.prefix(2 * n)?;
        run.tx.push(
            Actor::Alice,
            EventKind::Attack,
            &json!({"attack": "capture-and-measure", "captured": captured, "extracted": extracted}),
        );
        run.outcome.extraction = Some(Extraction { extracted, consumed });
        y_b = rest;
    }
    let Some(y_b) = run.screen(&spec.defenses, Actor::Trent, &y_b) else {
        return Ok(run.finish(&board));
    };

    let (y_t, record) = trent_verify(&mut lab, &y_b, &keys.k_a, &keys.k_b)?;
    run.tx.push(Actor::Trent, EventKind::TrentRecord, &record);
    run.tx.push(Actor::Trent, EventKind::Send, &json!({"step": "V3", "to": "Bob", "carriers": y_t}));
    run.outcome.trent_record = Some(record.clone());

    let bob = bob_verify_and_compare(&mut lab, &y_t, &package.m_a, &halves.bob, &keys.k_b)?;
    run.outcome.v = Some(bob.v);
    run.outcome.v5 = Some(bob.outcome);
    run.outcome.mismatched = bob.mismatched.clone();
    run.tx.push(Actor::Bob, EventKind::Decision, &json!({"step": "V4", "V": bob.v}));

    let claims = match bob.outcome {
        VerifyOutcome::Reject => {
            run.outcome.status = RunStatus::AbortedPrePublication;
            (AliceClaim::SignedHonestly, BobClaim::DisputesComparison)
        }
        VerifyOutcome::Mismatch => {
            run.tx.push(
                Actor::Bob,
                EventKind::Decision,
                &json!({"step": "V5", "result": bob.outcome, "mismatched": bob.mismatched}),
            );
            run.outcome.status = RunStatus::AbortedPrePublication;
            (AliceClaim::SignedHonestly, BobClaim::DisputesComparison)
        }
        VerifyOutcome::MatchOk if spec.scenario == Scenario::BobLies => {
            let claim = bob_dos_negate(&bob)?;
            run.tx.push(
                Actor::Bob,
                EventKind::Decision,
                &json!({"step": "V5", "result": VerifyOutcome::Mismatch, "mismatched": []}),
            );
            run.tx.push(
                Actor::Bob,
                EventKind::Attack,
                &json!({"attack": "dos-negate", "true_result": bob.outcome}),
            );
            run.outcome.status = RunStatus::AbortedPrePublication;
            (AliceClaim::SignedHonestly, claim)
        }
        VerifyOutcome::MatchOk => {
            run.tx.push(
                Actor::Bob,
                EventKind::Decision,
                &json!({"step": "V5", "result": bob.outcome, "request": "r"}),
            );
            let posted = if spec.scenario == Scenario::AliceFalseR {
                let r_false = alice_publish_false_r(&mut board, &private.r, &mut adversary_rng);
                run.tx.push(
                    Actor::Alice,
                    EventKind::Attack,
                    &json!({"attack": "false-r", "r_true": private.r, "r_posted": r_false}),
                );
                r_false
            } else {
                publish_r(&mut board, &private.r);
                private.r.clone()
            };
            run.tx.push(Actor::Alice, EventKind::BoardPost, &json!({"step": "V6", "r": posted}));

            let recovered = bob_recover(&bob.p_prime, &posted)?;
            run.tx.push(
                Actor::Bob,
                EventKind::Decision,
                &json!({"step": "V7", "recovered": recovered, "signature": {"s_a": bob.s_a, "r": posted}}),
            );
            run.outcome.recover_fidelities = Some(recovered.fidelities(&message.prepare("p"))?);
            run.outcome.signature_valid = Some(verify_signature_pair(&bob.s_a, &posted, &message, &keys.k_a)?);
            let alice = if posted == private.r {
                AliceClaim::SignedHonestly
            } else {
                AliceClaim::Repudiates
            };
            run.outcome.published_r = Some(posted);
            (alice, BobClaim::Accepts)
        }
    };
    run.tx.push(Actor::Alice, EventKind::Claim, &claims.0);
    run.tx.push(Actor::Bob, EventKind::Claim, &claims.1);
    let verdict = arbitrate(&record, claims.0, claims.1);
    run.tx.push(Actor::Trent, EventKind::Verdict, &verdict);
    run.outcome.claims = Some(claims);
    run.outcome.verdict = Some(verdict);
    Ok(run.finish(&board))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qotp::{decrypt, encrypt};

    fn spec(scenario: Scenario, n: usize, trial: u64) -> TrialSpec {
        TrialSpec {
            scenario,
            n,
            seed: 20,
            trial,
            defenses: DefenseConfig::NONE,
        }
    }

    #[test]
    fn streams_are_independent_and_stable() {
        use rand::RngCore;
        let a = derive_rng(1, 0, "keys").next_u64();
        assert_eq!(a, derive_rng(1, 0, "keys").next_u64());
        assert_ne!(a, derive_rng(1, 0, "pad").next_u64());
        assert_ne!(a, derive_rng(1, 1, "keys").next_u64());
        assert_ne!(a, derive_rng(2, 0, "keys").next_u64());
    }

    #[test]
    fn honest_run() {
        let report = run_trial(&spec(Scenario::Honest, 3, 0)).unwrap();
        let o = &report.outcome;
        assert_eq!(o.status, RunStatus::Completed);
        assert_eq!((o.v, o.v5), (Some(true), Some(VerifyOutcome::MatchOk)));
        assert!(o.recover_fidelity_min().unwrap() >= 1.0 - 1e-9);
        assert_eq!(o.signature_valid, Some(true));
        assert_eq!(o.verdict, Some(Verdict::NoDispute));
        assert!(o.law_deviation <= 1e-12);
        assert_eq!(report.transcript.board().len(), 1);
        assert_eq!(report.transcript.count(EventKind::Verdict), 1);
    }

    #[test]
    fn scenarios_share_protocol_randomness() {
        let honest = run_trial(&spec(Scenario::Honest, 2, 5)).unwrap().outcome;
        let lies = run_trial(&spec(Scenario::BobLies, 2, 5)).unwrap().outcome;
        assert_eq!(honest.message, lies.message);
        assert_eq!(honest.true_r, lies.true_r);
        assert_eq!(honest.trent_record, lies.trent_record);
        assert_eq!(lies.verdict, Some(Verdict::Inconclusive));
        assert_eq!(lies.status, RunStatus::AbortedPrePublication);
        assert!(lies.published_r.is_none());
    }

    #[test]
    fn false_r_looks_like_an_honest_run_of_another_message() {
        let false_r = run_trial(&spec(Scenario::AliceFalseR, 3, 1)).unwrap();
        let o = &false_r.outcome;
        assert_eq!(o.signature_valid, Some(false));
        assert_eq!(o.verdict, Some(Verdict::Inconclusive));
        let r_false = o.published_r.clone().unwrap();
        let p_prime = encrypt(&o.message.prepare("p"), &o.true_r).unwrap();
        let other = MessageSpec::from_sequence(&decrypt(&p_prime, &r_false).unwrap()).unwrap();
        let honest = run_trial_with(
            &spec(Scenario::Honest, 3, 1),
            TrialOverrides {
                message: Some(other),
                pad: Some(r_false),
            },
        )
        .unwrap();
        assert_eq!(honest.outcome.verdict, Some(Verdict::NoDispute));
        assert_eq!(honest.transcript.protocol_view(), false_r.transcript.protocol_view());
    }

    #[test]
    fn ipe_without_defenses_is_stealthy() {
        let honest = run_trial(&spec(Scenario::Honest, 4, 2)).unwrap().outcome;
        let ipe = run_trial(&spec(Scenario::IpeAttack, 4, 2)).unwrap().outcome;
        assert!(ipe.extraction.as_ref().unwrap().is_exact());
        assert_eq!(ipe.trent_record, honest.trent_record);
        assert_eq!(ipe.verdict, Some(Verdict::NoDispute));
    }

    #[test]
    fn defenses_stop_the_run() {
        let mut s = spec(Scenario::DelayPhotonAttack, 2, 0);
        s.defenses = DefenseConfig::parse("pns").unwrap();
        let report = run_trial(&s).unwrap();
        assert_eq!(report.outcome.status, RunStatus::AttackDetected);
        assert!(report.outcome.verdict.is_none());
        assert!(report.outcome.extraction.is_none());
        assert_eq!(report.outcome.alarms[0].0, Actor::Bob);
        assert_eq!(report.transcript.count(EventKind::DefenseAlarm), 1);
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(run_trial(&spec(Scenario::Honest, 0, 0)).unwrap_err(), RunError::EmptyMessage);
        assert!(matches!(
            run_trial(&spec(Scenario::AliceTampersMa { indices: vec![3] }, 2, 0)),
            Err(RunError::Attack(AttackError::IndexOutOfRange { index: 3, n: 2 }))
        ));
    }
}
