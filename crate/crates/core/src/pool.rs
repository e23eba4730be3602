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

//! Registry of every live qubit in a run, grouped into entangled clusters.
//!
//! Each label belongs to exactly one [`PureState`] group. Operations that
//! couple two groups (a Bell measurement across them) merge the groups by
//! tensor product first, so the register cap of [`crate::statevector`]
//! bounds how much entanglement a run may build up.

use std::collections::BTreeMap;

use crate::statevector::{BellOutcome, Collapse, Label, PauliBits, PureState, Result, StateError};

#[derive(Clone, Debug, Default)]
pub struct QubitPool {
    groups: BTreeMap<u64, PureState>,
    owner: BTreeMap<Label, u64>,
    next_group: u64,
}

impl QubitPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a new group; fails if any of its labels is already live.
    pub fn insert(&mut self, state: PureState) -> Result<()> {
        if let Some(l) = state.labels().iter().find(|l| self.owner.contains_key(*l)) {
            return Err(StateError::LabelCollision(l.clone()));
        }
        let id = self.next_group;
        self.next_group += 1;
        for l in state.labels() {
            self.owner.insert(l.clone(), id);
        }
        if state.num_qubits() > 0 {
            self.groups.insert(id, state);
        }
        Ok(())
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.owner.contains_key(label)
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    fn group_id(&self, label: &Label) -> Result<u64> {
        self.owner
            .get(label)
            .copied()
            .ok_or_else(|| StateError::UnknownLabel(label.clone()))
    }

    /// The group that currently holds `label`.
    pub fn group(&self, label: &Label) -> Result<&PureState> {
        let id = self.group_id(label)?;
        Ok(&self.groups[&id])
    }

    /// The state of `label` alone; fails if it is entangled with anything.
    pub fn qubit(&self, label: &Label) -> Result<PureState> {
        let group = self.group(label)?;
        if group.num_qubits() != 1 {
            return Err(StateError::Entangled(label.clone()));
        }
        Ok(group.clone())
    }

    pub fn apply_pauli(&mut self, label: &Label, p: PauliBits) -> Result<()> {
        let id = self.group_id(label)?;
        let next = self.groups[&id].apply_pauli(label, p)?;
        self.groups.insert(id, next);
        Ok(())
    }

    pub fn apply_pauli_inverse(&mut self, label: &Label, p: PauliBits) -> Result<()> {
        let id = self.group_id(label)?;
        let next = self.groups[&id].apply_pauli_inverse(label, p)?;
        self.groups.insert(id, next);
        Ok(())
    }

    /// Puts both labels into one group, tensoring their groups if needed.
    fn join(&mut self, first: &Label, second: &Label) -> Result<u64> {
        let a = self.group_id(first)?;
        let b = self.group_id(second)?;
        if a == b {
            return Ok(a);
        }
        let merged = self.groups[&a].tensor(&self.groups[&b])?;
        self.groups.remove(&b);
        for l in merged.labels() {
            self.owner.insert(l.clone(), a);
        }
        self.groups.insert(a, merged);
        Ok(a)
    }

    pub fn bell_probabilities(&mut self, first: &Label, second: &Label) -> Result<[f64; 4]> {
        let id = self.join(first, second)?;
        self.groups[&id].bell_probabilities(first, second)
    }

    /// Destructive Bell measurement: both measured labels leave the pool,
    /// the remaining group collapses.
    pub fn bell_measure(&mut self, first: &Label, second: &Label, collapse: Collapse<'_>) -> Result<BellOutcome> {
        let id = self.join(first, second)?;
        let (outcome, residual) = self.groups[&id].bell_measure_with(first, second, collapse)?;
        self.owner.remove(first);
        self.owner.remove(second);
        if residual.num_qubits() == 0 {
            self.groups.remove(&id);
        } else {
            self.groups.insert(id, residual);
        }
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l(s: &str) -> Label {
        Label::from(s)
    }

    #[test]
    fn measurement_merges_and_collapses() {
        let mut pool = QubitPool::new();
        let p = PureState::make_qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), "p").unwrap();
        pool.insert(p.clone()).unwrap();
        pool.insert(PureState::make_bell_pair("a", "b").unwrap()).unwrap();
        assert!(matches!(pool.qubit(&l("b")), Err(StateError::Entangled(_))));

        let probs = pool.bell_probabilities(&l("p"), &l("a")).unwrap();
        assert!(probs.iter().all(|q| (q - 0.25).abs() < 1e-12));
        assert_eq!(pool.group(&l("b")).unwrap().num_qubits(), 3);

        let o = pool
            .bell_measure(&l("p"), &l("a"), Collapse::Forced(BellOutcome::PhiPlus))
            .unwrap();
        assert_eq!(o, BellOutcome::PhiPlus);
        assert!(!pool.contains(&l("p")) && !pool.contains(&l("a")));
        let b = pool.qubit(&l("b")).unwrap();
        assert!(b.equal_up_to_phase(&p.relabeled(vec![l("b")]).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn measuring_a_whole_group_removes_it() {
        let mut pool = QubitPool::new();
        pool.insert(PureState::make_bell_pair("a", "b").unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let o = pool.bell_measure(&l("a"), &l("b"), Collapse::Sample(&mut rng)).unwrap();
        assert_eq!(o, BellOutcome::PhiPlus);
        assert!(pool.is_empty());
    }

    #[test]
    fn rejects_live_label_reuse() {
        let mut pool = QubitPool::new();
        pool.insert(PureState::basis("a", false)).unwrap();
        assert_eq!(
            pool.insert(PureState::basis("a", true)).unwrap_err(),
            StateError::LabelCollision(l("a"))
        );
        assert_eq!(
            pool.apply_pauli(&l("z"), PauliBits::X).unwrap_err(),
            StateError::UnknownLabel(l("z"))
        );
    }
}
