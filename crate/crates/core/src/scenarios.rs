//! Small concurrent programs over a shared flag `x ∈ {0, 1}`, encoded in the
//! term language, with the qualitative behaviour each one should show.
//!
//! State `0` is `x = 0` and state `1` is `x = 1`; any other program variable
//! (a loop counter, say) is abstracted away. The encodings are illustrative:
//!
//! ```text
//! x := 1                  skip ; pgm{(0,1),(1,1)} ; skip
//! do x ≠ 1 -> y++ od      om(fin(eps) ; pgm{(0,0)}) ; fin(eps) ; pgm{(1,1)} ; skip
//! do true -> y++ od       inf(fin(eps) ; pgm{(0,0),(1,1)})
//! ```
//!
//! The guard test of `do x ≠ 1` is folded into the program step of each
//! iteration (and of the exit), rather than taken as a separate step.

use std::fmt;

use serde::Serialize;

use crate::check::{diagnostics, Diagnostics};
use crate::denote::{Denotation, Evaluator};
use crate::error::EvalError;
use crate::state::{Lasso, StateSpace, Status, Window};
use crate::syntax::{parse, Command};

pub const ASSIGN: &str = "skip ; pgm{(0,1),(1,1)} ; skip";
pub const LOOP_UNTIL_SET: &str = "om(fin(eps) ; pgm{(0,0)}) ; fin(eps) ; pgm{(1,1)} ; skip";
pub const LOOP_FOREVER: &str = "inf(fin(eps) ; pgm{(0,0),(1,1)})";

pub const NAMES: [&str; 5] = ["ex-term", "inc-y-loop", "fair-term", "example1", "example2"];

/// What an example is expected to show.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// Some run from `x = 0` never sets `x`: the loop pre-empts forever.
    PreemptedForever,
    /// The loop runs forever from `x = 0` when nobody sets `x`.
    LoopsWhileUnset,
    /// Terminates, and no run stays at `x = 0` forever.
    FairlyTerminates,
    /// No infinite run, no abort, and no termination past the progress
    /// horizon: every run gets stuck.
    EventuallyStuck,
    /// Infinite runs exist.
    RunsForever,
}

#[derive(Debug, Clone)]
pub struct ExampleCase {
    pub name: &'static str,
    pub program: &'static str,
    pub space: StateSpace,
    pub ast: Command,
    pub expected: Expectation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownExample(pub String);

impl fmt::Display for UnknownExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown example `{}` (known: {})", self.0, NAMES.join(", "))
    }
}

impl std::error::Error for UnknownExample {}

pub fn build_example(name: &str) -> Result<ExampleCase, UnknownExample> {
    let (name, program, src, expected) = match name {
        "ex-term" => (
            "ex-term",
            "x := 1 || do x != 1 -> y++ od",
            format!("({ASSIGN}) || ({LOOP_UNTIL_SET})"),
            Expectation::PreemptedForever,
        ),
        "inc-y-loop" => (
            "inc-y-loop",
            "do x != 1 -> y++ od",
            LOOP_UNTIL_SET.to_string(),
            Expectation::LoopsWhileUnset,
        ),
        "fair-term" => (
            "fair-term",
            "(x := 1 && fair) || (do x != 1 -> y++ od && fair)",
            format!("(({ASSIGN}) && fair) || (({LOOP_UNTIL_SET}) && fair)"),
            Expectation::FairlyTerminates,
        ),
        "example1" => (
            "example1",
            "(x := 1 && fair) || (do true -> y++ od && fair)",
            format!("(({ASSIGN}) && fair) || (({LOOP_FOREVER}) && fair)"),
            Expectation::EventuallyStuck,
        ),
        "example2" => (
            "example2",
            "(x := 1 && fair) ; skip || (do true -> y++ od && fair) ; skip",
            format!("((({ASSIGN}) && fair) ; skip) || ((({LOOP_FOREVER}) && fair) ; skip)"),
            Expectation::RunsForever,
        ),
        other => return Err(UnknownExample(other.to_string())),
    };
    Ok(ExampleCase {
        name,
        program,
        space: StateSpace::new(2).expect("two states"),
        ast: parse(&src).expect("example encodings parse"),
        expected,
    })
}

pub fn all_examples() -> Vec<ExampleCase> {
    NAMES.iter().map(|n| build_example(n).expect("listed")).collect()
}

/// A lasso from `x = 0` that never leaves `x = 0` yet makes program
/// progress: the assignment is pre-empted forever.
pub fn preempting_lasso(d: &Denotation) -> Option<Lasso> {
    d.lassos()
        .find(|l| {
            l.initial == 0
                && l.prefix.iter().chain(&l.period).all(|s| s.pre == 0 && s.post == 0)
                && l.period.iter().any(|s| s.is_program())
        })
        .cloned()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleOutcome {
    pub name: &'static str,
    pub expected: Expectation,
    pub diagnostics: Diagnostics,
    /// Shown as text; present when some run pre-empts the assignment forever.
    pub preempting_lasso: Option<String>,
    pub passed: bool,
}

pub fn run_example(case: &ExampleCase, window: Window) -> Result<ExampleOutcome, EvalError> {
    let d = Evaluator::new(case.space, window).denote(&case.ast)?;
    let diag = diagnostics(&d);
    let preempt = preempting_lasso(&d);
    let passed = match case.expected {
        Expectation::PreemptedForever | Expectation::LoopsWhileUnset => preempt.is_some(),
        Expectation::FairlyTerminates => diag.has_terminated && preempt.is_none(),
        Expectation::EventuallyStuck => {
            // Dead ends that can be postponed indefinitely leave no horizon;
            // then no run may terminate at all.
            let h = diag.progress_horizon.unwrap_or(0);
            !diag.has_lasso && !diag.has_aborted && d.traces().all(|t| t.status != Status::Terminated || t.len() <= h)
        }
        Expectation::RunsForever => diag.has_lasso,
    };
    Ok(ExampleOutcome {
        name: case.name,
        expected: case.expected,
        diagnostics: diag,
        preempting_lasso: preempt.map(|l| l.to_string()),
        passed,
    })
}
