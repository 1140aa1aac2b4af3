use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::bindings::{generate_bindings, Bindings};
use super::template::render;
use super::{catalog, mutants, LawRelation, LawSpec};
use crate::check::{check_equal, check_refines, Side, Verdict};
use crate::denote::{Evaluator, DEFAULT_CAP};
use crate::error::EvalError;
use crate::oracle::{Budget, Oracle};
use crate::state::{Observation, StateSpace, Window};
use crate::syntax::{parse, Command};

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub space: StateSpace,
    pub window: Window,
    /// Bindings checked per quantified law.
    pub samples: usize,
    /// Depth of random command terms.
    pub depth: usize,
    pub seed: u64,
    pub cap: usize,
}

impl SuiteConfig {
    pub fn new(space: StateSpace, window: Window) -> Self {
        SuiteConfig {
            space,
            window,
            samples: 100,
            depth: 3,
            seed: 0,
            cap: DEFAULT_CAP,
        }
    }
}

/// A law instance that does not hold within the window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub bindings: BTreeMap<String, String>,
    #[serde(rename = "witnessSide")]
    pub witness_side: &'static str,
    pub witness: String,
    #[serde(skip)]
    pub lhs: Command,
    #[serde(skip)]
    pub rhs: Command,
    #[serde(skip)]
    pub observation: Observation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    /// The hypothesis of a sampled implication failed; nothing was checked.
    PremiseFailed,
    Violated(Box<Violation>),
}

fn instantiate(template: &str, bindings: &Bindings, law: &LawSpec, w: Window) -> Result<Command, EvalError> {
    let src = render(template, &bindings.env(law, w)).map_err(EvalError::UnboundVariable)?;
    Ok(parse(&src)?)
}

fn violation(bindings: &Bindings, lhs: Command, rhs: Command, v: Verdict) -> Outcome {
    let w = v.witness.expect("failed verdicts carry a witness");
    Outcome::Violated(Box::new(Violation {
        bindings: bindings.display_map(),
        witness_side: match w.side {
            Side::Left => "lhs",
            Side::Right => "rhs",
        },
        witness: w.observation.to_string(),
        lhs,
        rhs,
        observation: w.observation,
    }))
}

/// Checks one instance of a law at the evaluator's window.
pub fn check_instance(ev: &mut Evaluator, law: &LawSpec, bindings: &Bindings) -> Result<Outcome, EvalError> {
    let w = ev.window();
    if let Some((h, k)) = law.hypothesis {
        let (h, k) = (instantiate(h, bindings, law, w)?, instantiate(k, bindings, law, w)?);
        if !check_refines(ev, &h, &k)?.holds_refines() {
            return Ok(Outcome::PremiseFailed);
        }
    }
    let sides = law
        .sides
        .iter()
        .map(|t| instantiate(t, bindings, law, w))
        .collect::<Result<Vec<_>, _>>()?;
    for pair in sides.windows(2) {
        let (l, r) = (&pair[0], &pair[1]);
        let v = match law.relation {
            LawRelation::Equal => check_equal(ev, l, r)?,
            LawRelation::Refines => check_refines(ev, l, r)?,
        };
        let holds = match law.relation {
            LawRelation::Equal => v.holds_equal(),
            LawRelation::Refines => v.holds_refines(),
        };
        if !holds {
            return Ok(violation(bindings, l.clone(), r.clone(), v));
        }
    }
    Ok(Outcome::Holds)
}

/// Confirms with the membership oracle that a witness lies on its side only.
pub fn revalidate(v: &Violation, space: StateSpace, budget: Budget) -> Result<bool, EvalError> {
    let mut oracle = Oracle::new(space, budget);
    let in_lhs = oracle.member(&v.lhs, &v.observation)?;
    let in_rhs = oracle.member(&v.rhs, &v.observation)?;
    Ok(match v.witness_side {
        "lhs" => in_lhs && !in_rhs,
        _ => in_rhs && !in_lhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Pass,
    Fail,
    /// Every instance hit the resource cap.
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub law: String,
    pub status: ReportStatus,
    /// Instances actually checked.
    pub instances: usize,
    /// Instances abandoned at the resource cap.
    pub skipped: usize,
    pub violations: Vec<Violation>,
    pub window: Window,
    /// Samples whose hypothesis failed (sampled implications only).
    #[serde(skip)]
    pub premise_filtered: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Checks up to `samples` instances of a law (one for closed laws, and at
/// least every curated combination for laws over atomic steps only).
///
/// With `stop_at_first`, stops at the first violation.
pub fn run_law(law: &LawSpec, cfg: &SuiteConfig, stop_at_first: bool) -> LawReport {
    let start = Instant::now();
    let mut ev = Evaluator::with_cap(cfg.space, cfg.window, cfg.cap);
    let stream = generate_bindings(law, cfg.space, cfg.depth, cfg.seed);
    let target = if law.is_closed() {
        1
    } else {
        cfg.samples.max(stream.exhaustive_len())
    };
    let attempts = if law.is_sampled_implication() {
        target * 20
    } else {
        target * 2
    };
    let (mut checked, mut skipped, mut filtered) = (0, 0, 0);
    let mut violations = Vec::new();
    for b in stream.take(attempts) {
        if checked == target {
            break;
        }
        match check_instance(&mut ev, law, &b) {
            Ok(Outcome::Holds) => checked += 1,
            Ok(Outcome::PremiseFailed) => filtered += 1,
            Ok(Outcome::Violated(v)) => {
                checked += 1;
                violations.push(*v);
                if stop_at_first {
                    break;
                }
            }
            Err(EvalError::ResourceExceeded { .. }) => skipped += 1,
            Err(e) => panic!("{}: malformed instance: {e}", law.name),
        }
    }
    let status = if !violations.is_empty() {
        ReportStatus::Fail
    } else if checked == 0 {
        ReportStatus::Skipped
    } else {
        ReportStatus::Pass
    };
    LawReport {
        law: law.name.to_string(),
        status,
        instances: checked,
        skipped,
        violations,
        window: cfg.window,
        premise_filtered: filtered,
        elapsed: start.elapsed(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub laws: Vec<LawReport>,
    pub mutants: Vec<LawReport>,
}

impl SuiteReport {
    /// No law fails and every mutant is refuted.
    pub fn ok(&self) -> bool {
        self.laws.iter().all(|r| r.status != ReportStatus::Fail)
            && self.mutants.iter().all(|r| r.status == ReportStatus::Fail)
    }
}

/// Runs the catalog (optionally a single law) and, with `with_mutants`, the
/// mutation list. A name matching a mutant runs that mutant.
pub fn run_suite(cfg: &SuiteConfig, only: Option<&str>, with_mutants: bool) -> SuiteReport {
    let wanted = |l: &LawSpec| only.is_none_or(|n| n == l.name);
    let laws = catalog()
        .iter()
        .filter(|l| wanted(l))
        .map(|l| run_law(l, cfg, false))
        .collect();
    let mutants = mutants()
        .iter()
        .filter(|l| (with_mutants && wanted(l)) || only == Some(l.name))
        .map(|l| run_law(l, cfg, true))
        .collect();
    SuiteReport { laws, mutants }
}
