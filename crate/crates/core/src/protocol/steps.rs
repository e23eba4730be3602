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

//! Protocol steps in causal order.

use rand::{Rng, RngCore};
use serde::Serialize;

use super::arbiter::TrentRecord;
use super::board::PublicBoard;
use super::channel::{apply_slot_pad, signal_per_slot, stream_digest, Band, Carrier, Lab, PadDirection};
use super::message::MessageSpec;
use super::transcript::Actor;
use super::ProtocolError;
use crate::qotp::{self, KeyBits, KeyRole, QubitSequence};
use crate::statevector::{teleport_correction, BellOutcome, Collapse, Label, PureState};

/// Tolerance of every state-equality test in the protocol.
pub const EQUALITY_TOLERANCE: f64 = 1e-9;

/// Deviation from 1/4 tolerated in the signer's Bell-outcome law.
const UNIFORM_LAW_TOLERANCE: f64 = 1e-12;

/// Qubit families. `pm` is the copy Alice consumes in her Bell measurement.
pub(crate) const P_PRIME: &str = "p";
pub(crate) const S_A: &str = "sa";
const MEASURED_COPY: &str = "pm";
const ALICE_HALF: &str = "a";
const BOB_HALF: &str = "b";
const V_QUBIT: &str = "v";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeySet {
    pub k_a: KeyBits,
    pub k_b: KeyBits,
    /// The Alice–Bob key; no step consumes it.
    pub k_ab: KeyBits,
}

/// Trusted key setup for an `n`-qubit message: `K_A` covers `|P'⟩`, `K_B`
/// covers `(|P'⟩, |S_A⟩, V)`.
pub fn setup_keys<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<KeySet, ProtocolError> {
    if n == 0 {
        return Err(ProtocolError::EmptyMessage);
    }
    Ok(KeySet {
        k_a: KeyBits::random(2 * n, KeyRole::Alice, rng),
        k_b: KeyBits::random(4 * n + 2, KeyRole::Bob, rng),
        k_ab: KeyBits::random(2 * n, KeyRole::Shared, rng),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellHalves {
    pub alice: Vec<Label>,
    pub bob: Vec<Label>,
}

/// Creates `n` fresh `Φ+` pairs `(a_i, b_i)`; the `b` halves go to Bob over
/// a perfect authenticated channel.
pub fn distribute_bell_pairs(lab: &mut Lab, n: usize) -> Result<BellHalves, ProtocolError> {
    if n == 0 {
        return Err(ProtocolError::EmptyMessage);
    }
    let mut halves = BellHalves {
        alice: Vec::with_capacity(n),
        bob: Vec::with_capacity(n),
    };
    for i in 1..=n {
        let (a, b) = (Label::indexed(ALICE_HALF, i), Label::indexed(BOB_HALF, i));
        lab.pool_mut().insert(PureState::make_bell_pair(a.clone(), b.clone())?)?;
        halves.alice.push(a);
        halves.bob.push(b);
    }
    Ok(halves)
}

/// `|S⟩ = (|P'⟩, |S_A⟩, M_A)` as sent to Bob.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignaturePackage {
    pub p_prime: Vec<Carrier>,
    pub s_a: Vec<Carrier>,
    pub m_a: Vec<BellOutcome>,
}

impl SignaturePackage {
    pub fn n(&self) -> usize {
        self.m_a.len()
    }

    /// Checks that both quantum parts occupy one signal slot per message
    /// qubit, as a detector without photon-number resolution counts them.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        let n = self.n();
        for (what, stream) in [("|P'⟩ signal slots", &self.p_prime), ("|S_A⟩ signal slots", &self.s_a)] {
            let slots: std::collections::BTreeSet<u32> =
                stream.iter().filter(|c| c.band == Band::Signal).map(|c| c.time_slot).collect();
            let found = slots.len();
            if found != n {
                return Err(ProtocolError::SizeMismatch { what, expected: n, found });
            }
        }
        Ok(())
    }

    /// `|P'⟩ ‖ |S_A⟩` as one stream.
    pub fn quantum_stream(&self) -> Vec<Carrier> {
        self.p_prime.iter().chain(&self.s_a).cloned().collect()
    }
}

/// What Alice keeps to herself after signing.
#[derive(Clone, Debug, PartialEq)]
pub struct AlicePrivate {
    pub r: KeyBits,
    /// Analytic Bell-outcome probabilities of each `(P'_i, A_i)` pair, taken
    /// before sampling.
    pub outcome_probabilities: Vec<[f64; 4]>,
    /// The outcomes Alice actually observed.
    pub measured: Vec<BellOutcome>,
}

/// Source of Alice's Bell outcomes.
pub enum Outcomes<'a> {
    Sample(&'a mut dyn RngCore),
    /// One post-selected outcome per pair.
    Forced(&'a [BellOutcome]),
}

/// Signing with a freshly drawn pad; `rng` supplies both the pad and the
/// measurement randomness.
pub fn alice_sign<R: RngCore>(
    lab: &mut Lab,
    spec: &MessageSpec,
    k_a: &KeyBits,
    alice_halves: &[Label],
    rng: &mut R,
) -> Result<(SignaturePackage, AlicePrivate), ProtocolError> {
    let r = qotp::gen_pad_r(spec.n(), rng)?;
    alice_sign_with_pad(lab, spec, k_a, alice_halves, r, Outcomes::Sample(rng))
}

/// Signing under a given pad `r`.
///
/// Alice prepares three copies of `|P⟩` from `spec`, pads each with `r`,
/// derives `|S_A⟩ = E_{K_A}(|P'⟩)` from one, and Bell-measures another
/// against her halves of the shared pairs, which teleports `|P'⟩` onto
/// Bob's halves up to the Pauli named by `M_A`.
pub fn alice_sign_with_pad(
    lab: &mut Lab,
    spec: &MessageSpec,
    k_a: &KeyBits,
    alice_halves: &[Label],
    r: KeyBits,
    mut outcomes: Outcomes<'_>,
) -> Result<(SignaturePackage, AlicePrivate), ProtocolError> {
    let n = spec.n();
    if alice_halves.len() != n {
        return Err(ProtocolError::SizeMismatch {
            what: "Bell pairs",
            expected: n,
            found: alice_halves.len(),
        });
    }
    if let Outcomes::Forced(list) = &outcomes {
        if list.len() != n {
            return Err(ProtocolError::SizeMismatch {
                what: "forced outcomes",
                expected: n,
                found: list.len(),
            });
        }
    }
    let r = r.prefix(2 * n)?;

    let sent = qotp::encrypt(&spec.prepare(P_PRIME), &r)?;
    let s_a = qotp::encrypt(&qotp::encrypt(&spec.prepare(S_A), &r)?, k_a)?;
    let measured_copy = qotp::encrypt(&spec.prepare(MEASURED_COPY), &r)?;

    let mut package = SignaturePackage {
        p_prime: Vec::with_capacity(n),
        s_a: Vec::with_capacity(n),
        m_a: Vec::with_capacity(n),
    };
    for (i, q) in sent.iter().enumerate() {
        lab.pool_mut().insert(q.clone())?;
        package.p_prime.push(lab.emit(q.labels()[0].clone(), Band::Signal, i as u32));
    }
    for (i, q) in s_a.iter().enumerate() {
        lab.pool_mut().insert(q.clone())?;
        package.s_a.push(lab.emit(q.labels()[0].clone(), Band::Signal, (n + i) as u32));
    }

    let mut probabilities = Vec::with_capacity(n);
    for (i, (q, a)) in measured_copy.iter().zip(alice_halves).enumerate() {
        let p = &q.labels()[0];
        lab.pool_mut().insert(q.clone())?;
        let probs = lab.pool_mut().bell_probabilities(p, a)?;
        if probs.iter().any(|&x| (x - 0.25).abs() > UNIFORM_LAW_TOLERANCE) {
            return Err(ProtocolError::NonUniformOutcomeLaw {
                index: i,
                probabilities: probs,
            });
        }
        probabilities.push(probs);
        let collapse = match &mut outcomes {
            Outcomes::Sample(rng) => Collapse::Sample(&mut **rng),
            Outcomes::Forced(list) => Collapse::Forced(list[i]),
        };
        package.m_a.push(lab.pool_mut().bell_measure(p, a, collapse)?);
    }

    let private = AlicePrivate {
        r,
        outcome_probabilities: probabilities,
        measured: package.m_a.clone(),
    };
    Ok((package, private))
}

/// Encrypts `|P'⟩ ‖ |S_A⟩` under `K_B` for Trent. `M_A` stays with Bob.
pub fn bob_forward(lab: &mut Lab, package: &SignaturePackage, k_b: &KeyBits) -> Result<Vec<Carrier>, ProtocolError> {
    package.validate()?;
    let stream = package.quantum_stream();
    apply_slot_pad(lab, &stream, k_b, PadDirection::Encrypt)?;
    Ok(stream)
}

fn snapshot(lab: &Lab, carriers: &[Carrier]) -> Result<QubitSequence, ProtocolError> {
    let qubits = carriers.iter().map(|c| lab.qubit(&c.qubit)).collect::<Result<_, _>>()?;
    Ok(QubitSequence::new(qubits)?)
}

/// Trent's verification: decrypt with `K_B`, check `E_{K_A}(|P'⟩) = |S_A⟩`,
/// set `V`, and return `E_{K_B}(|P'⟩, |S_A⟩, V)`.
pub fn trent_verify(
    lab: &mut Lab,
    y_b: &[Carrier],
    k_a: &KeyBits,
    k_b: &KeyBits,
) -> Result<(Vec<Carrier>, TrentRecord), ProtocolError> {
    let registered = signal_per_slot(y_b)?;
    if registered.is_empty() || registered.len() % 2 != 0 {
        return Err(ProtocolError::MalformedStream(format!(
            "expected an even, nonzero number of slots, got {}",
            registered.len()
        )));
    }
    let n = registered.len() / 2;
    if k_b.len() < 4 * n + 2 {
        return Err(qotp::QotpError::KeyTooShort {
            needed: 4 * n + 2,
            available: k_b.len(),
        }
        .into());
    }
    let received_digest = stream_digest(lab, &registered)?;

    apply_slot_pad(lab, &registered, k_b, PadDirection::Decrypt)?;
    let p_prime = snapshot(lab, &registered[..n])?;
    let s_a = snapshot(lab, &registered[n..])?;
    let s_t = qotp::encrypt(&p_prime, k_a)?;
    let v = s_t.matches_up_to_phase(&s_a, EQUALITY_TOLERANCE)?.iter().all(|&m| m);

    let v_label = Label::new(V_QUBIT);
    lab.pool_mut().insert(PureState::basis(v_label.clone(), v))?;
    let mut y_t = registered;
    y_t.push(lab.emit(v_label, Band::Signal, (2 * n) as u32));
    apply_slot_pad(lab, &y_t, k_b, PadDirection::Encrypt)?;
    let returned_digest = stream_digest(lab, &y_t)?;

    let record = TrentRecord {
        received_digest,
        p_prime,
        s_a,
        v,
        returned_digest,
    };
    Ok((y_t, record))
}

/// Result of Bob's teleportation comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VerifyOutcome {
    /// Trent reported `V = 0`.
    Reject,
    #[serde(rename = "MatchOK")]
    MatchOk,
    Mismatch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BobVerification {
    pub v: bool,
    pub outcome: VerifyOutcome,
    /// 0-based positions where `|P'_B⟩` differs from `|P'⟩`.
    pub mismatched: Vec<usize>,
    pub p_prime: QubitSequence,
    pub s_a: QubitSequence,
    /// Bob's corrected halves; absent when `V = 0`.
    pub p_prime_b: Option<QubitSequence>,
}

/// Bob decrypts Trent's reply, rejects on `V = 0`, otherwise corrects his
/// halves by `M_A` and compares them with `|P'⟩` qubit by qubit.
pub fn bob_verify_and_compare(
    lab: &mut Lab,
    y_t: &[Carrier],
    m_a: &[BellOutcome],
    bob_halves: &[Label],
    k_b: &KeyBits,
) -> Result<BobVerification, ProtocolError> {
    let n = m_a.len();
    if bob_halves.len() != n {
        return Err(ProtocolError::SizeMismatch {
            what: "Bob's Bell halves",
            expected: n,
            found: bob_halves.len(),
        });
    }
    let registered = signal_per_slot(y_t)?;
    if registered.len() != 2 * n + 1 {
        return Err(ProtocolError::SizeMismatch {
            what: "slots in Trent's reply",
            expected: 2 * n + 1,
            found: registered.len(),
        });
    }
    apply_slot_pad(lab, &registered, k_b, PadDirection::Decrypt)?;
    let p_prime = snapshot(lab, &registered[..n])?;
    let s_a = snapshot(lab, &registered[n..2 * n])?;
    let v_label = &registered[2 * n].qubit;
    let v = lab.qubit(v_label)?.prob_one(v_label)? > 0.5;

    if !v {
        return Ok(BobVerification {
            v,
            outcome: VerifyOutcome::Reject,
            mismatched: Vec::new(),
            p_prime,
            s_a,
            p_prime_b: None,
        });
    }

    for (b, &o) in bob_halves.iter().zip(m_a) {
        lab.pool_mut().apply_pauli(b, teleport_correction(o))?;
    }
    let p_prime_b = QubitSequence::new(bob_halves.iter().map(|b| lab.qubit(b)).collect::<Result<_, _>>()?)?;
    let mismatched: Vec<usize> = p_prime_b
        .matches_up_to_phase(&p_prime, EQUALITY_TOLERANCE)?
        .iter()
        .enumerate()
        .filter(|(_, &m)| !m)
        .map(|(i, _)| i)
        .collect();
    let outcome = if mismatched.is_empty() {
        VerifyOutcome::MatchOk
    } else {
        VerifyOutcome::Mismatch
    };
    Ok(BobVerification {
        v,
        outcome,
        mismatched,
        p_prime,
        s_a,
        p_prime_b: Some(p_prime_b),
    })
}

/// Alice posts `r` on the board.
pub fn publish_r(board: &mut PublicBoard, r: &KeyBits) {
    board.post(Actor::Alice, r.clone());
}

/// `|P⟩ = E_r⁻¹(|P'⟩)`.
pub fn bob_recover(p_prime: &QubitSequence, r: &KeyBits) -> Result<QubitSequence, ProtocolError> {
    Ok(qotp::decrypt(p_prime, r)?)
}

/// Checks a finished signature `(|S_A⟩, r)` against the signer's message:
/// true iff `E_{K_A}(E_r(|P⟩)) = |S_A⟩` qubit by qubit.
pub fn verify_signature_pair(
    s_a: &QubitSequence,
    r: &KeyBits,
    spec: &MessageSpec,
    k_a: &KeyBits,
) -> Result<bool, ProtocolError> {
    if s_a.len() != spec.n() {
        return Err(ProtocolError::SizeMismatch {
            what: "signature length",
            expected: spec.n(),
            found: s_a.len(),
        });
    }
    let expected = qotp::encrypt(&qotp::encrypt(&spec.prepare(S_A), r)?, k_a)?;
    Ok(expected.matches_up_to_phase(s_a, EQUALITY_TOLERANCE)?.iter().all(|&m| m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::PauliBits;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    struct Signed {
        lab: Lab,
        keys: KeySet,
        halves: BellHalves,
        package: SignaturePackage,
        private: AlicePrivate,
    }

    fn sign(n: usize, seed: u64) -> Signed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keys = setup_keys(n, &mut rng).unwrap();
        let spec = MessageSpec::random_generic(n, &mut rng).unwrap();
        let mut lab = Lab::new();
        let halves = distribute_bell_pairs(&mut lab, n).unwrap();
        let (package, private) = alice_sign(&mut lab, &spec, &keys.k_a, &halves.alice, &mut rng).unwrap();
        Signed {
            lab,
            keys,
            halves,
            package,
            private,
        }
    }

    #[test]
    fn key_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let keys = setup_keys(4, &mut rng).unwrap();
        assert_eq!((keys.k_a.len(), keys.k_b.len(), keys.k_ab.len()), (8, 18, 8));
        assert_eq!(keys, setup_keys(4, &mut ChaCha8Rng::seed_from_u64(1)).unwrap());
        assert_eq!(setup_keys(0, &mut rng).unwrap_err(), ProtocolError::EmptyMessage);
    }

    #[test]
    fn key_bits_are_balanced() {
        // 10⁴ setups × 1 bit of K_A each; binomial σ = sqrt(N/4).
        let runs = 10_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ones = (0..runs)
            .filter(|_| setup_keys(1, &mut rng).unwrap().k_b.bits()[0])
            .count();
        let sigma = (runs as f64 * 0.25).sqrt();
        assert!((ones as f64 - runs as f64 / 2.0).abs() <= 5.0 * sigma);
    }

    #[test]
    fn bell_pairs_are_correlated() {
        let mut lab = Lab::new();
        let halves = distribute_bell_pairs(&mut lab, 2).unwrap();
        let pair = lab.pool().group(&halves.bob[1]).unwrap();
        assert_eq!(pair.labels(), &[halves.alice[1].clone(), halves.bob[1].clone()]);
        let probs: Vec<f64> = pair.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        // Only 00 and 11 occur.
        assert!(probs[1] == 0.0 && probs[2] == 0.0);
        assert!(matches!(distribute_bell_pairs(&mut lab, 0), Err(ProtocolError::EmptyMessage)));
    }

    #[test]
    fn sign_trivial_message() {
        let spec = MessageSpec::new(vec![(c(1.0, 0.0), c(0.0, 0.0))]).unwrap();
        let k_a = KeyBits::zeros(2, KeyRole::Alice);
        for forced in BellOutcome::ALL {
            let mut lab = Lab::new();
            let halves = distribute_bell_pairs(&mut lab, 1).unwrap();
            let r = KeyBits::zeros(2, KeyRole::Pad);
            let (package, private) =
                alice_sign_with_pad(&mut lab, &spec, &k_a, &halves.alice, r, Outcomes::Forced(&[forced])).unwrap();
            assert_eq!(lab.qubit(&package.p_prime[0].qubit).unwrap(), PureState::basis("p_1", false));
            assert_eq!(lab.qubit(&package.s_a[0].qubit).unwrap(), PureState::basis("sa_1", false));
            assert_eq!(package.m_a, vec![forced]);
            for p in private.outcome_probabilities[0] {
                assert!((p - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_plus_outcome_teleports_without_correction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = MessageSpec::random_generic(1, &mut rng).unwrap();
        let k_a = KeyBits::random(2, KeyRole::Alice, &mut rng);
        let mut lab = Lab::new();
        let halves = distribute_bell_pairs(&mut lab, 1).unwrap();
        let r = qotp::gen_pad_r(1, &mut rng).unwrap();
        let (package, _) = alice_sign_with_pad(
            &mut lab,
            &spec,
            &k_a,
            &halves.alice,
            r,
            Outcomes::Forced(&[BellOutcome::PhiPlus]),
        )
        .unwrap();
        let b = lab.qubit(&halves.bob[0]).unwrap();
        let p = lab.qubit(&package.p_prime[0].qubit).unwrap();
        assert!(b.relabeled(p.labels().to_vec()).unwrap().equal_up_to_phase(&p, 1e-12).unwrap());
    }

    #[test]
    fn signing_is_seed_deterministic() {
        let a = sign(6, 4);
        let b = sign(6, 4);
        assert_eq!(a.package, b.package);
        assert_eq!(a.private, b.private);
    }

    #[test]
    fn forward_with_zero_key_is_plaintext() {
        let mut s = sign(3, 5);
        let before: Vec<_> = s.package.quantum_stream().iter().map(|c| s.lab.qubit(&c.qubit).unwrap()).collect();
        let y_b = bob_forward(&mut s.lab, &s.package, &KeyBits::zeros(14, KeyRole::Bob)).unwrap();
        assert_eq!(y_b.len(), 6);
        let after: Vec<_> = y_b.iter().map(|c| s.lab.qubit(&c.qubit).unwrap()).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn forward_then_trent_decrypt_round_trips() {
        let mut s = sign(4, 6);
        let p_before = snapshot(&s.lab, &s.package.p_prime).unwrap();
        let sa_before = snapshot(&s.lab, &s.package.s_a).unwrap();
        let y_b = bob_forward(&mut s.lab, &s.package, &s.keys.k_b).unwrap();
        let (_, record) = trent_verify(&mut s.lab, &y_b, &s.keys.k_a, &s.keys.k_b).unwrap();
        assert_eq!(record.p_prime, p_before);
        assert_eq!(record.s_a, sa_before);
        assert!(record.v);
    }

    #[test]
    fn trent_rejects_signature_under_wrong_alice_key() {
        let mut s = sign(3, 7);
        let mut bits = s.keys.k_a.bits().to_vec();
        bits[0] = !bits[0];
        let wrong = KeyBits::new(bits, KeyRole::Alice);
        let y_b = bob_forward(&mut s.lab, &s.package, &s.keys.k_b).unwrap();
        let (y_t, record) = trent_verify(&mut s.lab, &y_b, &wrong, &s.keys.k_b).unwrap();
        assert!(!record.v);
        let bob = bob_verify_and_compare(&mut s.lab, &y_t, &s.package.m_a, &s.halves.bob, &s.keys.k_b).unwrap();
        assert_eq!(bob.outcome, VerifyOutcome::Reject);
        assert!(bob.p_prime_b.is_none());
    }

    #[test]
    fn honest_flow_matches_for_every_forced_outcome() {
        for forced in BellOutcome::ALL {
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let n = 3;
            let keys = setup_keys(n, &mut rng).unwrap();
            let spec = MessageSpec::random_generic(n, &mut rng).unwrap();
            let mut lab = Lab::new();
            let halves = distribute_bell_pairs(&mut lab, n).unwrap();
            let r = qotp::gen_pad_r(n, &mut rng).unwrap();
            let forced = vec![forced; n];
            let (package, private) =
                alice_sign_with_pad(&mut lab, &spec, &keys.k_a, &halves.alice, r, Outcomes::Forced(&forced)).unwrap();
            let y_b = bob_forward(&mut lab, &package, &keys.k_b).unwrap();
            let (y_t, record) = trent_verify(&mut lab, &y_b, &keys.k_a, &keys.k_b).unwrap();
            assert!(record.v);
            let bob = bob_verify_and_compare(&mut lab, &y_t, &package.m_a, &halves.bob, &keys.k_b).unwrap();
            assert_eq!(bob.outcome, VerifyOutcome::MatchOk);

            let mut board = PublicBoard::new();
            publish_r(&mut board, &private.r);
            let r = board.latest_from(Actor::Alice).unwrap();
            let recovered = bob_recover(&bob.p_prime, r).unwrap();
            for f in recovered.fidelities(&spec.prepare("x")).unwrap() {
                assert!(f >= 1.0 - 1e-9);
            }
            assert!(verify_signature_pair(&bob.s_a, r, &spec, &keys.k_a).unwrap());
        }
    }

    #[test]
    fn wrong_measurement_record_gives_mismatch() {
        let mut s = sign(2, 9);
        let mut m_a = s.package.m_a.clone();
        m_a[0] = BellOutcome::from_bits(m_a[0].bits().combine(PauliBits::X));
        let y_b = bob_forward(&mut s.lab, &s.package, &s.keys.k_b).unwrap();
        let (y_t, _) = trent_verify(&mut s.lab, &y_b, &s.keys.k_a, &s.keys.k_b).unwrap();
        let bob = bob_verify_and_compare(&mut s.lab, &y_t, &m_a, &s.halves.bob, &s.keys.k_b).unwrap();
        assert_eq!(bob.outcome, VerifyOutcome::Mismatch);
        assert_eq!(bob.mismatched, vec![0]);
    }

    #[test]
    fn recover_with_zero_pad_is_identity_and_wrong_pad_degrades() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let spec = MessageSpec::random_generic(3, &mut rng).unwrap();
        let p = spec.prepare("p");
        assert_eq!(bob_recover(&p, &KeyBits::zeros(6, KeyRole::Pad)).unwrap(), p);

        let r = KeyBits::from_bit_str("011000", KeyRole::Pad).unwrap();
        let r_wrong = KeyBits::from_bit_str("011011", KeyRole::Pad).unwrap();
        let p_prime = qotp::encrypt(&p, &r).unwrap();
        let fids = bob_recover(&p_prime, &r_wrong).unwrap().fidelities(&p).unwrap();
        assert!(fids[0] > 1.0 - 1e-12 && fids[1] > 1.0 - 1e-12);
        assert!(fids[2] < 1.0 - 1e-6);
        assert!(matches!(
            bob_recover(&p_prime, &KeyBits::zeros(4, KeyRole::Pad)),
            Err(ProtocolError::Qotp(qotp::QotpError::KeyTooShort { .. }))
        ));
    }

    #[test]
    fn signature_pair_detects_tampering() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let spec = MessageSpec::random_generic(4, &mut rng).unwrap();
        let k_a = KeyBits::random(8, KeyRole::Alice, &mut rng);
        let r = qotp::gen_pad_r(4, &mut rng).unwrap();
        let s_a = qotp::encrypt(&qotp::encrypt(&spec.prepare("s"), &r).unwrap(), &k_a).unwrap();
        assert!(verify_signature_pair(&s_a, &r, &spec, &k_a).unwrap());

        let mut bits = r.bits().to_vec();
        bits[5] = !bits[5];
        assert!(!verify_signature_pair(&s_a, &KeyBits::new(bits, KeyRole::Pad), &spec, &k_a).unwrap());

        for p in [PauliBits::X, PauliBits::Z, PauliBits::XZ] {
            let mut qubits = s_a.clone().into_inner();
            let l = qubits[2].labels()[0].clone();
            qubits[2] = qubits[2].apply_pauli(&l, p).unwrap();
            let tampered = QubitSequence::new(qubits).unwrap();
            assert!(!verify_signature_pair(&tampered, &r, &spec, &k_a).unwrap(), "{p}");
        }
    }
}
