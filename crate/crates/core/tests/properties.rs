use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fairlab::check::{check_equal, check_refines, Relation, Side};
use fairlab::denote::{Denotation, Evaluator};
use fairlab::gen::{random_command, Shape};
use fairlab::oracle::{oracle_member, Budget};
use fairlab::state::{canonicalize_lasso, close, Lasso, StateSpace, Status, Step, Trace, Window};
use fairlab::syntax::{parse, Command};

const SIZE: usize = 2;

fn step(kind: bool, pre: u16, post: u16) -> Step {
    if kind {
        Step::program(pre, post)
    } else {
        Step::env(pre, post)
    }
}

/// Contiguous steps visiting `states` in order, starting from `from`.
fn walk(from: u16, states: &[(bool, u16)]) -> Vec<Step> {
    let mut at = from;
    states
        .iter()
        .map(|&(k, to)| {
            let s = step(k, at, to);
            at = to;
            s
        })
        .collect()
}

prop_compose! {
    fn lasso()(init in 0..SIZE as u16,
               pre in prop::collection::vec((any::<bool>(), 0..SIZE as u16), 0..4),
               per in prop::collection::vec((any::<bool>(), 0..SIZE as u16), 0..3),
               close_kind in any::<bool>()) -> Lasso {
        let prefix = walk(init, &pre);
        let start = prefix.last().map_or(init, |s| s.post);
        let mut period = walk(start, &per);
        let end = period.last().map_or(start, |s| s.post);
        period.push(step(close_kind, end, start));
        Lasso::new(init, prefix, period).unwrap()
    }
}

fn command(seed: u64, depth: usize) -> Command {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape { depth, derived: true, powers: true, wide_choice: true };
    random_command(&mut rng, StateSpace::new(SIZE).unwrap(), shape)
}

fn is_closed(d: &Denotation) -> bool {
    let traces: BTreeSet<Trace> = d.traces().collect();
    let n = d.window().n;
    let space = d.space();
    traces.iter().all(|t| {
        let prefixes = (0..=t.len()).all(|k| traces.contains(&t.prefix(k, Status::Incomplete)));
        let extended = t.status != Status::Aborted
            || t.len() == n
            || space.steps_from(t.end()).all(|s| {
                let mut steps = t.steps.clone();
                steps.push(s);
                Status::ALL
                    .iter()
                    .all(|&st| traces.contains(&Trace::new(t.initial, steps.clone(), st).unwrap()))
            });
        prefixes && extended
    }) && space
        .states()
        .all(|s| traces.contains(&Trace::empty(s, Status::Incomplete)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn canonical_lasso_is_idempotent(l in lasso()) {
        let c = canonicalize_lasso(l).unwrap();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(canonicalize_lasso(c.clone()).unwrap(), c);
    }

    #[test]
    fn canonical_lasso_ignores_powering_and_rotation(l in lasso(), k in 2usize..4) {
        let c = canonicalize_lasso(l.clone()).unwrap();
        let powered = Lasso::new(l.initial, l.prefix.clone(), l.period.repeat(k)).unwrap();
        prop_assert_eq!(canonicalize_lasso(powered).unwrap(), c.clone());
        let mut prefix = l.prefix.clone();
        prefix.push(l.period[0]);
        let mut period = l.period[1..].to_vec();
        period.push(l.period[0]);
        let rotated = Lasso::new(l.initial, prefix, period).unwrap();
        prop_assert_eq!(canonicalize_lasso(rotated).unwrap(), c);
    }

    #[test]
    fn close_is_idempotent_and_extensive(seed in any::<u64>()) {
        let space = StateSpace::new(SIZE).unwrap();
        let w = Window::new(3, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let mut traces = BTreeSet::new();
        for _ in 0..rng.gen_range(0..4) {
            let len = rng.gen_range(0..=w.n);
            let mut at = rng.gen_range(0..SIZE as u16);
            let init = at;
            let steps: Vec<Step> = (0..len).map(|_| {
                let to = rng.gen_range(0..SIZE as u16);
                let s = step(rng.gen_bool(0.5), at, to);
                at = to;
                s
            }).collect();
            let status = Status::ALL[rng.gen_range(0..3)];
            traces.insert(Trace::new(init, steps, status).unwrap());
        }
        let (f1, l1) = close(&space, &traces, &BTreeSet::new(), &w);
        prop_assert!(traces.is_subset(&f1));
        let (f2, l2) = close(&space, &f1, &l1, &w);
        prop_assert_eq!(f1, f2);
        prop_assert_eq!(l1, l2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parse_print_round_trip(seed in any::<u64>(), depth in 0usize..=5) {
        let c = command(seed, depth);
        prop_assert!(c.depth() <= depth);
        let printed = c.to_string();
        prop_assert_eq!(parse(&printed).unwrap(), c, "{}", printed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn denotations_are_closed_and_nonempty(seed in any::<u64>()) {
        let c = command(seed, 3);
        let mut ev = Evaluator::new(StateSpace::new(SIZE).unwrap(), Window::new(3, 1, 2).unwrap());
        let d = ev.denote(&c).unwrap();
        prop_assert!(is_closed(&d), "{}", c);
    }

    #[test]
    fn every_command_equals_itself(seed in any::<u64>()) {
        let c = command(seed, 3);
        let mut ev = Evaluator::new(StateSpace::new(SIZE).unwrap(), Window::new(3, 1, 2).unwrap());
        prop_assert_eq!(check_equal(&mut ev, &c, &c.clone()).unwrap().relation, Relation::Equal);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// `c ⊑ d` exactly when `c + d = c`.
    #[test]
    fn refinement_matches_choice_absorption(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (c, d) = (command(s1, 3), command(s2, 3));
        let mut ev = Evaluator::new(StateSpace::new(SIZE).unwrap(), Window::new(3, 1, 2).unwrap());
        let refines = check_refines(&mut ev, &c, &d).unwrap().holds_refines();
        let absorbed = check_equal(&mut ev, &Command::Choice(vec![c.clone(), d.clone()]), &c).unwrap().holds_equal();
        prop_assert_eq!(refines, absorbed, "{} / {}", c, d);
    }

    #[test]
    fn witnesses_revalidate_with_the_oracle(s1 in any::<u64>(), s2 in any::<u64>()) {
        let space = StateSpace::new(SIZE).unwrap();
        let (c, d) = (command(s1, 2), command(s2, 2));
        let mut ev = Evaluator::new(space, Window::new(3, 1, 2).unwrap());
        let v = check_equal(&mut ev, &c, &d).unwrap();
        if let Some(w) = v.witness {
            let (inside, outside) = match w.side { Side::Left => (&c, &d), Side::Right => (&d, &c) };
            let b = Budget { unroll: 3, multiples: 3 };
            prop_assert!(oracle_member(inside, space, &w.observation, b).unwrap(), "{} in {}", w.observation, inside);
            prop_assert!(!oracle_member(outside, space, &w.observation, b).unwrap(), "{} not in {}", w.observation, outside);
        }
    }
}
