"""Smoke test for the `aqs` extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/aqs-*.whl
"""

import json
import math

import aqs


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL {what}")
    print(f"ok   {what}")


# Teleportation through one Bell pair, every outcome.
alpha, beta = 0.6, 0.8j
layout = aqs.PureState.qubit(alpha, beta, "p").tensor(aqs.PureState.bell_pair("a", "b"))
probs = layout.bell_probabilities("p", "a")
check(all(abs(p - 0.25) < 1e-12 for p in probs), "Bell outcome law is uniform")
target = aqs.PureState.qubit(alpha, beta, "b")
for outcome in ["PhiPlus", "PhiMinus", "PsiPlus", "PsiMinus"]:
    rest = layout.bell_measure_forced("p", "a", outcome)
    x, z = aqs.teleport_correction(outcome)
    check(rest.apply_pauli("b", x, z).equal_up_to_phase(target), f"correction restores state after {outcome}")

# One-time pad round trip.
states = [aqs.PureState.qubit(1 / math.sqrt(2), 1j / math.sqrt(2), f"q_{i}") for i in range(3)]
enc = aqs.encrypt(states, "101101")
back = aqs.decrypt(enc, "101101")
check(all(abs(b.fidelity(s) - 1) < 1e-12 for b, s in zip(back, states)), "pad decrypts exactly")
check(enc[0].labels == ["q_0"], "labels survive encryption")

# Protocol runs.
honest = aqs.run_trial("honest", 4, seed=7)
check(honest.verdict == "NoDispute" and honest.signature_valid, "honest run is accepted")
check(json.loads(honest.transcript)["config"]["n"] == 4, "transcript is JSON")

lies = aqs.run_trial("bob-lies", 4, seed=7)
tamper = aqs.run_trial("alice-tampers-ma", 4, seed=7, indices=[2])
check(lies.trent_record == tamper.trent_record, "dilemma: Trent's records are identical")
check(lies.verdict == tamper.verdict == "Inconclusive", "dilemma: verdicts are inconclusive")

ipe = aqs.run_trial("ipe", 4, seed=7)
check(ipe.extraction_exact and ipe.verdict == "NoDispute", "invisible photons extract the key unnoticed")
blocked = aqs.run_trial("ipe", 4, seed=7, defenses="wavelength-filter")
check(blocked.status == "attack-detected" and blocked.alarms > 0, "wavelength filter raises an alarm")

summary, transcripts = aqs.run_batch("alice-false-r", 3, trials=5, seed=1)
check(json.loads(summary)["all_passed"], "false-r batch shows the expected outcome")
check(len(json.loads(transcripts)) == 5, "batch returns one transcript per trial")

try:
    aqs.run_trial("bogus", 1, seed=0)
except ValueError:
    print("ok   unknown scenario raises ValueError")
else:
    raise SystemExit("FAIL unknown scenario accepted")

print("smoke test passed")
