//! Window-bounded equality and refinement between commands.
//!
//! `c ⊑ d` holds when every observation of `d` is an observation of `c`.
//! Positive answers are only claims about the window; negative answers come
//! with a concrete witness.

use std::fmt;

use serde::Serialize;

use crate::denote::{Denotation, Evaluator};
use crate::error::EvalError;
use crate::state::{Observation, Status, Window};
use crate::syntax::Command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// Equal up to the window.
    Equal,
    /// Left refines to right (`lhs ⊑ rhs`) but not conversely.
    RefinesTo,
    /// Right refines to left.
    RefinedBy,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// An observation that belongs to one side only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub side: Side,
    pub observation: Observation,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "only in {}: {}", self.side, self.observation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub relation: Relation,
    pub window: Window,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn holds_equal(&self) -> bool {
        self.relation == Relation::Equal
    }

    /// Whether `lhs ⊑ rhs` holds up to the window.
    pub fn holds_refines(&self) -> bool {
        matches!(self.relation, Relation::Equal | Relation::RefinesTo)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::Equal => "equal",
            Relation::RefinesTo => "left refines to right",
            Relation::RefinedBy => "right refines to left",
            Relation::Incomparable => "incomparable",
        };
        write!(f, "{rel} (up to window {})", self.window)?;
        if let Some(w) = &self.witness {
            write!(f, "; {w}")?;
        }
        Ok(())
    }
}

fn shorter(a: &Observation, b: &Observation) -> bool {
    let key = |o: &Observation| match o {
        Observation::Finite(t) => (0, t.len()),
        Observation::Infinite(l) => (1, l.prefix.len() + l.period.len()),
    };
    key(a) < key(b)
}

/// Compares two denotations over the same universe.
pub fn compare(lhs: &Denotation, rhs: &Denotation) -> Verdict {
    let only_left = lhs.first_missing(rhs);
    let only_right = rhs.first_missing(lhs);
    let relation = match (&only_left, &only_right) {
        (None, None) => Relation::Equal,
        (Some(_), None) => Relation::RefinesTo,
        (None, Some(_)) => Relation::RefinedBy,
        (Some(_), Some(_)) => Relation::Incomparable,
    };
    let witness = match (only_left, only_right) {
        (Some(l), Some(r)) => Some(if shorter(&r, &l) {
            Witness {
                side: Side::Right,
                observation: r,
            }
        } else {
            Witness {
                side: Side::Left,
                observation: l,
            }
        }),
        (Some(l), None) => Some(Witness {
            side: Side::Left,
            observation: l,
        }),
        (None, Some(r)) => Some(Witness {
            side: Side::Right,
            observation: r,
        }),
        (None, None) => None,
    };
    Verdict {
        relation,
        window: lhs.window(),
        witness,
    }
}

pub fn check_equal(ev: &mut Evaluator, lhs: &Command, rhs: &Command) -> Result<Verdict, EvalError> {
    Ok(compare(&ev.denote(lhs)?, &ev.denote(rhs)?))
}

/// Checks `lhs ⊑ rhs`. On failure the witness is an observation of `rhs`
/// missing from `lhs`.
pub fn check_refines(ev: &mut Evaluator, lhs: &Command, rhs: &Command) -> Result<Verdict, EvalError> {
    let (l, r) = (ev.denote(lhs)?, ev.denote(rhs)?);
    let mut v = compare(&l, &r);
    if !v.holds_refines() {
        v.witness = r.first_missing(&l).map(|observation| Witness {
            side: Side::Right,
            observation,
        });
    }
    Ok(v)
}

/// Summary facts about a denotation within its window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub has_terminated: bool,
    pub has_aborted: bool,
    pub has_lasso: bool,
    /// Length of the longest incomplete trace that is neither extended nor
    /// completed within the window; `None` when there is none.
    pub progress_horizon: Option<usize>,
}

pub fn diagnostics(d: &Denotation) -> Diagnostics {
    let traces: Vec<_> = d.traces().collect();
    let has_terminated = traces.iter().any(|t| t.status == Status::Terminated);
    let has_aborted = traces.iter().any(|t| t.status == Status::Aborted);
    let has_lasso = d.lasso_count() > 0;
    let n = d.window().n;
    let mut horizon: Option<usize> = None;
    for t in traces.iter().filter(|t| t.status == Status::Incomplete) {
        let implied = traces.iter().any(|u| {
            u.initial == t.initial
                && u.steps.starts_with(&t.steps)
                && (u.len() > t.len() || u.status != Status::Incomplete)
        }) || t.len() == n;
        if !implied {
            horizon = Some(horizon.map_or(t.len(), |h| h.max(t.len())));
        }
    }
    Diagnostics {
        has_terminated,
        has_aborted,
        has_lasso,
        progress_horizon: horizon,
    }
}
