//! Atomic step commands and the step-level synchronisation tables.

use std::collections::BTreeSet;

use crate::state::{Step, StepKind, StateSpace};

/// A set of steps: an element of the Boolean algebra of atomic commands.
///
/// Choice is union, conjunction is intersection, `!` is complement; `alpha`
/// (every step) is the least element and the empty set is the greatest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicCommand {
    space: StateSpace,
    steps: BTreeSet<Step>,
}

impl AtomicCommand {
    pub fn from_steps(space: StateSpace, steps: impl IntoIterator<Item = Step>) -> Self {
        Self {
            space,
            steps: steps.into_iter().collect(),
        }
    }

    pub fn empty(space: StateSpace) -> Self {
        Self::from_steps(space, [])
    }

    pub fn pi(space: StateSpace) -> Self {
        Self::from_steps(space, space.all_steps().filter(|s| s.kind == StepKind::Program))
    }

    pub fn eps(space: StateSpace) -> Self {
        Self::from_steps(
            space,
            space.all_steps().filter(|s| s.kind == StepKind::Environment),
        )
    }

    pub fn alpha(space: StateSpace) -> Self {
        Self::from_steps(space, space.all_steps())
    }

    pub fn negate(&self) -> Self {
        Self::from_steps(
            self.space,
            self.space.all_steps().filter(|s| !self.steps.contains(s)),
        )
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_steps(self.space, self.steps.union(&other.steps).copied())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_steps(self.space, self.steps.intersection(&other.steps).copied())
    }

    pub fn contains(&self, s: &Step) -> bool {
        self.steps.contains(s)
    }

    pub fn steps(&self) -> &BTreeSet<Step> {
        &self.steps
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Lifts a step synchronisation table to sets: every defined pairing.
    pub fn sync_with(&self, other: &Self, sync: fn(Step, Step) -> Option<Step>) -> Self {
        let steps = self
            .steps
            .iter()
            .flat_map(|&s| other.steps.iter().filter_map(move |&t| sync(s, t)));
        Self::from_steps(self.space, steps)
    }
}

/// Parallel synchronisation of two steps: a program step matches the identical
/// environment step, two identical environment steps give that environment
/// step, and every other pairing is infeasible.
pub fn step_sync_par(a: Step, b: Step) -> Option<Step> {
    if a.pre != b.pre || a.post != b.post {
        return None;
    }
    match (a.kind, b.kind) {
        (StepKind::Program, StepKind::Environment) | (StepKind::Environment, StepKind::Program) => {
            Some(Step::program(a.pre, a.post))
        }
        (StepKind::Environment, StepKind::Environment) => Some(a),
        (StepKind::Program, StepKind::Program) => None,
    }
}

/// Weak-conjunction synchronisation of two steps: equal steps only.
pub fn step_sync_conj(a: Step, b: Step) -> Option<Step> {
    (a == b).then_some(a)
}

/// Every way of producing `r` by synchronising two steps under `sync`.
pub fn sync_preimages(r: Step, sync: fn(Step, Step) -> Option<Step>) -> Vec<(Step, Step)> {
    let cands = [
        Step::program(r.pre, r.post),
        Step::env(r.pre, r.post),
    ];
    let mut out = Vec::new();
    for a in cands {
        for b in cands {
            if sync(a, b) == Some(r) {
                out.push((a, b));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spaces() -> Vec<StateSpace> {
        vec![StateSpace::new(1).unwrap(), StateSpace::new(2).unwrap()]
    }

    #[test]
    fn pi_over_two_states_has_four_steps() {
        let sp = StateSpace::new(2).unwrap();
        let pi = AtomicCommand::pi(sp);
        assert_eq!(pi.len(), 4);
        for a in 0..2 {
            for b in 0..2 {
                assert!(pi.contains(&Step::program(a, b)));
            }
        }
    }

    #[test]
    fn pi_is_complement_of_eps() {
        for sp in spaces() {
            assert_eq!(AtomicCommand::eps(sp).negate(), AtomicCommand::pi(sp));
            let pi = AtomicCommand::pi(sp);
            let eps = AtomicCommand::eps(sp);
            assert_eq!(pi.union(&eps), AtomicCommand::alpha(sp));
            assert!(pi.intersection(&eps).is_empty());
        }
    }

    #[test]
    fn par_table() {
        assert_eq!(
            step_sync_par(Step::program(0, 1), Step::env(0, 1)),
            Some(Step::program(0, 1))
        );
        assert_eq!(
            step_sync_par(Step::env(0, 1), Step::program(0, 1)),
            Some(Step::program(0, 1))
        );
        assert_eq!(step_sync_par(Step::program(0, 1), Step::program(0, 1)), None);
        assert_eq!(step_sync_par(Step::program(0, 1), Step::env(0, 0)), None);
        assert_eq!(
            step_sync_par(Step::env(1, 0), Step::env(1, 0)),
            Some(Step::env(1, 0))
        );
    }

    #[test]
    fn conj_table() {
        assert_eq!(
            step_sync_conj(Step::program(0, 1), Step::program(0, 1)),
            Some(Step::program(0, 1))
        );
        assert_eq!(step_sync_conj(Step::program(0, 1), Step::env(0, 1)), None);
    }

    fn all_atomics(sp: StateSpace) -> Vec<AtomicCommand> {
        let universe: Vec<Step> = sp.all_steps().collect();
        (0u32..(1 << universe.len()))
            .map(|mask| {
                AtomicCommand::from_steps(
                    sp,
                    universe
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, s)| *s),
                )
            })
            .collect()
    }

    #[test]
    fn lifted_identities_hold_exhaustively() {
        for sp in spaces() {
            let eps = AtomicCommand::eps(sp);
            let alpha = AtomicCommand::alpha(sp);
            for a in all_atomics(sp) {
                assert_eq!(a.sync_with(&eps, step_sync_par), a);
                assert_eq!(a.sync_with(&alpha, step_sync_conj), a);
            }
            let pi = AtomicCommand::pi(sp);
            assert!(pi.sync_with(&eps, step_sync_conj).is_empty());
            assert!(pi.sync_with(&pi, step_sync_par).is_empty());
        }
    }

    #[test]
    fn lifted_conj_is_intersection() {
        let sp = StateSpace::new(1).unwrap();
        let all = all_atomics(sp);
        for a in &all {
            for b in &all {
                assert_eq!(a.sync_with(b, step_sync_conj), a.intersection(b));
            }
        }
    }

    #[test]
    fn step_tables_commute_and_associate() {
        for sp in spaces() {
            let steps: Vec<Step> = sp.all_steps().collect();
            for sync in [step_sync_par as fn(Step, Step) -> Option<Step>, step_sync_conj] {
                for &a in &steps {
                    for &b in &steps {
                        assert_eq!(sync(a, b), sync(b, a));
                        for &c in &steps {
                            let l = sync(a, b).and_then(|ab| sync(ab, c));
                            let r = sync(b, c).and_then(|bc| sync(a, bc));
                            assert_eq!(l, r);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn preimages_cover_table() {
        let r = Step::program(0, 1);
        assert_eq!(sync_preimages(r, step_sync_par).len(), 2);
        assert_eq!(sync_preimages(Step::env(0, 1), step_sync_par).len(), 1);
        assert_eq!(sync_preimages(r, step_sync_conj), vec![(r, r)]);
    }
}
