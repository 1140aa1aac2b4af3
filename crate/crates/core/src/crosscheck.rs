//! Exhaustive comparison of the automata engine against the membership
//! oracle over every term up to a depth.

use std::time::{Duration, Instant};

use crate::denote::Evaluator;
use crate::error::EvalError;
use crate::gen::{enumerate, Binary, Unary, PRIMITIVE_LEAVES};
use crate::oracle::{Budget, Oracle};
use crate::state::{step_sequences, window_lassos, Observation, StateSpace, Status, Trace, Window};
use crate::syntax::Command;

pub const UNARY: [Unary; 6] = [Unary::Fin, Unary::Om, Unary::Inf, Unary::Pow(0), Unary::Pow(1), Unary::Pow(2)];
pub const BINARY: [Binary; 6] = [
    Binary::Seq,
    Binary::Choice,
    Binary::Join,
    Binary::Par,
    Binary::Conj,
    Binary::FairPar,
];

/// Every finite trace of length at most `N` (each status) and every window lasso.
pub fn window_observations(space: StateSpace, w: Window) -> Vec<Observation> {
    let mut out = Vec::new();
    for sigma in space.states() {
        for len in 0..=w.n {
            for steps in step_sequences(&space, sigma, len) {
                for status in Status::ALL {
                    out.push(Observation::Finite(Trace {
                        initial: sigma,
                        steps: steps.clone(),
                        status,
                    }));
                }
            }
        }
    }
    out.extend(window_lassos(&space, &w).into_iter().map(Observation::Infinite));
    out
}

#[derive(Debug, Clone)]
pub struct Disagreement {
    pub term: Command,
    pub observation: Observation,
    pub engine: bool,
}

#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub terms: usize,
    pub observations: usize,
    pub disagreements: Vec<Disagreement>,
    pub elapsed: Duration,
}

/// Compares engine and oracle on `terms` over the whole window universe.
/// Keeps at most `keep` disagreements but counts through all terms.
pub fn compare_terms(
    terms: &[Command],
    space: StateSpace,
    w: Window,
    budget: Budget,
    keep: usize,
) -> Result<(CrossCheck, usize), EvalError> {
    let start = Instant::now();
    let obs = window_observations(space, w);
    let mut ev = Evaluator::new(space, w);
    let mut oracle = Oracle::new(space, budget);
    let mut found = Vec::new();
    let mut total = 0;
    for c in terms {
        let d = ev.denote(c)?;
        let expect = oracle.members_transient(c, &obs)?;
        for (o, e) in obs.iter().zip(expect) {
            if d.contains(o) != e {
                total += 1;
                if found.len() < keep {
                    found.push(Disagreement {
                        term: c.clone(),
                        observation: o.clone(),
                        engine: !e,
                    });
                }
            }
        }
    }
    let report = CrossCheck {
        terms: terms.len(),
        observations: obs.len(),
        disagreements: found,
        elapsed: start.elapsed(),
    };
    Ok((report, total))
}

/// Every term of depth at most `depth` over the primitive leaves,
/// `fin om inf pow(_,0..2)` and the six binary operators.
pub fn exhaustive_terms(depth: usize) -> Vec<Command> {
    enumerate(depth, &PRIMITIVE_LEAVES, &UNARY, &BINARY)
}
