//! States, atomic steps, Aczel traces and lassos.
//!
//! A trace is a state-contiguous sequence of steps starting from an explicit
//! initial state and ending with a status. Infinite behaviour is represented
//! by ultimately periodic step sequences (lassos) kept in a canonical form so
//! that set equality of lassos is equality of the words they denote.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ContractError;

/// Identifier of a state in a [`StateSpace`].
pub type State = u16;

/// A finite state space `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateSpace {
    size: u16,
}

impl StateSpace {
    pub fn new(size: usize) -> Result<Self, ContractError> {
        if size == 0 || size > 64 {
            return Err(ContractError::StateSpaceSize(size));
        }
        Ok(Self { size: size as u16 })
    }

    pub fn size(&self) -> usize {
        self.size as usize
    }

    pub fn states(&self) -> impl Iterator<Item = State> + Clone {
        0..self.size
    }

    pub fn contains(&self, s: State) -> bool {
        s < self.size
    }

    /// Number of distinct steps (program and environment) over this space.
    pub fn step_count(&self) -> usize {
        2 * self.size() * self.size()
    }

    /// Every step of the universe, program steps first.
    pub fn all_steps(&self) -> impl Iterator<Item = Step> + '_ {
        [StepKind::Program, StepKind::Environment]
            .into_iter()
            .flat_map(move |kind| {
                self.states()
                    .flat_map(move |pre| self.states().map(move |post| Step { kind, pre, post }))
            })
    }

    /// Steps leaving `pre`.
    pub fn steps_from(&self, pre: State) -> impl Iterator<Item = Step> + '_ {
        [StepKind::Program, StepKind::Environment]
            .into_iter()
            .flat_map(move |kind| self.states().map(move |post| Step { kind, pre, post }))
    }

    /// Dense index of a step, in `0..step_count()`.
    pub fn step_index(&self, s: Step) -> usize {
        let n = self.size();
        let k = match s.kind {
            StepKind::Program => 0,
            StepKind::Environment => 1,
        };
        k * n * n + s.pre as usize * n + s.post as usize
    }

    pub fn step_at(&self, index: usize) -> Step {
        let n = self.size();
        let kind = if index < n * n {
            StepKind::Program
        } else {
            StepKind::Environment
        };
        let r = index % (n * n);
        Step {
            kind,
            pre: (r / n) as State,
            post: (r % n) as State,
        }
    }

    fn check_step(&self, s: &Step) -> Result<(), ContractError> {
        if self.contains(s.pre) && self.contains(s.post) {
            Ok(())
        } else {
            Err(ContractError::StepOutOfSpace(s.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StepKind {
    Program,
    Environment,
}

/// One atomic step `p(pre,post)` or `e(pre,post)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub kind: StepKind,
    pub pre: State,
    pub post: State,
}

impl Step {
    pub fn program(pre: State, post: State) -> Self {
        Self {
            kind: StepKind::Program,
            pre,
            post,
        }
    }

    pub fn env(pre: State, post: State) -> Self {
        Self {
            kind: StepKind::Environment,
            pre,
            post,
        }
    }

    pub fn is_program(&self) -> bool {
        self.kind == StepKind::Program
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            StepKind::Program => 'p',
            StepKind::Environment => 'e',
        };
        write!(f, "{}({},{})", k, self.pre, self.post)
    }
}

impl FromStr for Step {
    type Err = ContractError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ContractError::Malformed(format!("bad step `{s}`"));
        let s = s.trim();
        let kind = match s.chars().next() {
            Some('p') => StepKind::Program,
            Some('e') => StepKind::Environment,
            _ => return Err(bad()),
        };
        let inner = s[1..]
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let pre = a.trim().parse().map_err(|_| bad())?;
        let post = b.trim().parse().map_err(|_| bad())?;
        Ok(Step { kind, pre, post })
    }
}

/// How a finite trace ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Status {
    Terminated,
    Aborted,
    Incomplete,
}

impl Status {
    pub const ALL: [Status; 3] = [Status::Terminated, Status::Aborted, Status::Incomplete];

    pub fn marker(&self) -> &'static str {
        match self {
            Status::Terminated => "!term",
            Status::Aborted => "!abort",
            Status::Incomplete => "!inc",
        }
    }
}

/// Final state reached from `initial` after `steps` (assumes contiguity).
pub fn end_state(initial: State, steps: &[Step]) -> State {
    steps.last().map_or(initial, |s| s.post)
}

/// Checks that `steps` is state-contiguous starting from `initial`.
pub fn is_contiguous(initial: State, steps: &[Step]) -> bool {
    let mut cur = initial;
    for s in steps {
        if s.pre != cur {
            return false;
        }
        cur = s.post;
    }
    true
}

/// A finite Aczel trace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Trace {
    pub initial: State,
    pub steps: Vec<Step>,
    pub status: Status,
}

impl Trace {
    pub fn new(initial: State, steps: Vec<Step>, status: Status) -> Result<Self, ContractError> {
        if !is_contiguous(initial, &steps) {
            return Err(ContractError::NotContiguous(render_steps(initial, &steps)));
        }
        Ok(Self {
            initial,
            steps,
            status,
        })
    }

    pub fn empty(initial: State, status: Status) -> Self {
        Self {
            initial,
            steps: Vec::new(),
            status,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> State {
        end_state(self.initial, &self.steps)
    }

    pub fn with_status(&self, status: Status) -> Self {
        Self {
            initial: self.initial,
            steps: self.steps.clone(),
            status,
        }
    }

    /// Prefix of length `k` labelled `status`.
    pub fn prefix(&self, k: usize, status: Status) -> Self {
        Self {
            initial: self.initial,
            steps: self.steps[..k].to_vec(),
            status,
        }
    }

    pub fn validate(&self, space: &StateSpace) -> Result<(), ContractError> {
        if !space.contains(self.initial) {
            return Err(ContractError::StepOutOfSpace(format!("state {}", self.initial)));
        }
        for s in &self.steps {
            space.check_step(s)?;
        }
        if !is_contiguous(self.initial, &self.steps) {
            return Err(ContractError::NotContiguous(self.to_string()));
        }
        Ok(())
    }
}

fn render_steps(initial: State, steps: &[Step]) -> String {
    let mut out = format!("{initial}:");
    for s in steps {
        out.push(' ');
        out.push_str(&s.to_string());
    }
    out
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            render_steps(self.initial, &self.steps),
            self.status.marker()
        )
    }
}

/// An ultimately periodic infinite trace `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lasso {
    pub initial: State,
    pub prefix: Vec<Step>,
    pub period: Vec<Step>,
}

impl Lasso {
    /// Builds a lasso after checking contiguity and that the period is a cycle.
    /// The result is not canonicalized.
    pub fn new(initial: State, prefix: Vec<Step>, period: Vec<Step>) -> Result<Self, ContractError> {
        let l = Self {
            initial,
            prefix,
            period,
        };
        l.check_shape()?;
        Ok(l)
    }

    fn check_shape(&self) -> Result<(), ContractError> {
        if self.period.is_empty() {
            return Err(ContractError::EmptyPeriod);
        }
        let start = end_state(self.initial, &self.prefix);
        if !is_contiguous(self.initial, &self.prefix) || !is_contiguous(start, &self.period) {
            return Err(ContractError::NotContiguous(self.to_string()));
        }
        if end_state(start, &self.period) != start {
            return Err(ContractError::PeriodNotCycle(self.to_string()));
        }
        Ok(())
    }

    pub fn validate(&self, space: &StateSpace) -> Result<(), ContractError> {
        if !space.contains(self.initial) {
            return Err(ContractError::StepOutOfSpace(format!("state {}", self.initial)));
        }
        for s in self.prefix.iter().chain(&self.period) {
            space.check_step(s)?;
        }
        self.check_shape()
    }

    /// Step at position `i` of the infinite word.
    pub fn step_at(&self, i: usize) -> Step {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The first `k` steps of the infinite word.
    pub fn unroll(&self, k: usize) -> Vec<Step> {
        (0..k).map(|i| self.step_at(i)).collect()
    }

    /// The lasso obtained by dropping the first `k` steps.
    pub fn suffix(&self, k: usize) -> Lasso {
        let initial = if k == 0 {
            self.initial
        } else {
            self.step_at(k - 1).post
        };
        if k <= self.prefix.len() {
            Lasso {
                initial,
                prefix: self.prefix[k..].to_vec(),
                period: self.period.clone(),
            }
        } else {
            let r = (k - self.prefix.len()) % self.period.len();
            let mut period = self.period[r..].to_vec();
            period.extend_from_slice(&self.period[..r]);
            Lasso {
                initial,
                prefix: Vec::new(),
                period,
            }
        }
    }

    /// Whether the first `steps.len()` steps of this lasso equal `steps`.
    pub fn starts_with(&self, initial: State, steps: &[Step]) -> bool {
        self.initial == initial && steps.iter().enumerate().all(|(i, s)| self.step_at(i) == *s)
    }

    pub fn is_canonical(&self) -> bool {
        *self == canonicalize_lasso_unchecked(self.clone())
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_steps(self.initial, &self.prefix))?;
        let period: Vec<String> = self.period.iter().map(|s| s.to_string()).collect();
        write!(f, " [{}]^w", period.join(" "))
    }
}

/// Length of the primitive root of `word` (smallest `d` with `word = w[..d]^k`).
fn primitive_root_len(word: &[Step]) -> usize {
    let n = word.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| word[i] == word[i - d]))
        .unwrap_or(n)
}

fn canonicalize_lasso_unchecked(mut l: Lasso) -> Lasso {
    let d = primitive_root_len(&l.period);
    l.period.truncate(d);
    while let (Some(a), Some(b)) = (l.prefix.last(), l.period.last()) {
        if a != b {
            break;
        }
        l.prefix.pop();
        l.period.rotate_right(1);
    }
    l
}

/// Returns the canonical representative of the infinite word denoted by `l`:
/// primitive period and shortest prefix.
pub fn canonicalize_lasso(l: Lasso) -> Result<Lasso, ContractError> {
    l.check_shape()?;
    Ok(canonicalize_lasso_unchecked(l))
}

/// Observation bounds: finite traces up to `n` steps, lassos with prefix at
/// most `k` and period at most `l` steps (canonical form).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
}

impl Window {
    pub fn new(n: usize, k: usize, l: usize) -> Result<Self, ContractError> {
        if l == 0 {
            return Err(ContractError::WindowPeriod);
        }
        Ok(Self { n, k, l })
    }

    pub fn fits_trace(&self, t: &Trace) -> bool {
        t.len() <= self.n
    }

    pub fn fits_lasso(&self, l: &Lasso) -> bool {
        l.prefix.len() <= self.k && l.period.len() <= self.l
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={},K={},L={}", self.n, self.k, self.l)
    }
}

/// Either kind of observation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Observation {
    Finite(Trace),
    Infinite(Lasso),
}

impl Observation {
    pub fn initial(&self) -> State {
        match self {
            Observation::Finite(t) => t.initial,
            Observation::Infinite(l) => l.initial,
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Finite(t) => t.fmt(f),
            Observation::Infinite(l) => l.fmt(f),
        }
    }
}

impl FromStr for Observation {
    type Err = ContractError;

    /// Parses the rendering produced by `Display`, e.g. `0: p(0,1) !term` or
    /// `0: p(0,1) [e(1,1)]^w`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ContractError::Malformed(format!("bad observation `{s}`"));
        let (init, rest) = s.split_once(':').ok_or_else(bad)?;
        let initial: State = init.trim().parse().map_err(|_| bad())?;
        let rest = rest.trim();
        if let Some(open) = rest.find('[') {
            let prefix = parse_steps(&rest[..open])?;
            let body = rest[open + 1..].strip_suffix("]^w").ok_or_else(bad)?;
            let period = parse_steps(body)?;
            Ok(Observation::Infinite(Lasso::new(initial, prefix, period)?))
        } else {
            let (steps, marker) = rest.rsplit_once('!').map_or(("", rest), |(a, b)| (a, b));
            let status = match marker {
                "term" => Status::Terminated,
                "abort" => Status::Aborted,
                "inc" => Status::Incomplete,
                _ => return Err(bad()),
            };
            Ok(Observation::Finite(Trace::new(initial, parse_steps(steps)?, status)?))
        }
    }
}

fn parse_steps(s: &str) -> Result<Vec<Step>, ContractError> {
    s.split_whitespace().map(str::parse).collect()
}

/// Every contiguous step sequence of length `len` starting at `from`.
pub fn step_sequences(space: &StateSpace, from: State, len: usize) -> Vec<Vec<Step>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            let cur = end_state(from, w);
            for s in space.steps_from(cur) {
                let mut w2 = w.clone();
                w2.push(s);
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

/// Every canonical lasso over `space` that fits `w`, in a deterministic order.
pub fn window_lassos(space: &StateSpace, w: &Window) -> Vec<Lasso> {
    let mut out = Vec::new();
    for init in space.states() {
        for plen in 0..=w.k {
            for prefix in step_sequences(space, init, plen) {
                let at = end_state(init, &prefix);
                for qlen in 1..=w.l {
                    for period in step_sequences(space, at, qlen) {
                        if end_state(at, &period) != at {
                            continue;
                        }
                        let l = Lasso {
                            initial: init,
                            prefix: prefix.clone(),
                            period,
                        };
                        if l.is_canonical() {
                            out.push(l);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Closes a set of window observations under the two trace-set closure rules:
/// every prefix (including the trace itself) is present as an incomplete
/// trace, and every aborted trace is followed by every extension.
pub fn close(
    space: &StateSpace,
    traces: &BTreeSet<Trace>,
    lassos: &BTreeSet<Lasso>,
    w: &Window,
) -> (BTreeSet<Trace>, BTreeSet<Lasso>) {
    let mut fin: BTreeSet<Trace> = traces.clone();
    let mut inf: BTreeSet<Lasso> = lassos.clone();
    for t in traces {
        for k in 0..=t.len() {
            fin.insert(t.prefix(k, Status::Incomplete));
        }
    }
    for l in lassos {
        for k in 0..=w.n {
            fin.insert(Trace {
                initial: l.initial,
                steps: l.unroll(k),
                status: Status::Incomplete,
            });
        }
    }
    let aborted: Vec<Trace> = fin
        .iter()
        .filter(|t| t.status == Status::Aborted)
        .cloned()
        .collect();
    if !aborted.is_empty() {
        let window_lassos = window_lassos(space, w);
        for t in &aborted {
            let end = t.end();
            for extra in 0..=w.n.saturating_sub(t.len()) {
                for ext in step_sequences(space, end, extra) {
                    let mut steps = t.steps.clone();
                    steps.extend(ext);
                    for status in Status::ALL {
                        fin.insert(Trace {
                            initial: t.initial,
                            steps: steps.clone(),
                            status,
                        });
                    }
                }
            }
            for l in &window_lassos {
                if l.starts_with(t.initial, &t.steps) {
                    inf.insert(l.clone());
                }
            }
        }
    }
    (fin, inf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: State, b: State) -> Step {
        Step::env(a, b)
    }
    fn p(a: State, b: State) -> Step {
        Step::program(a, b)
    }

    #[test]
    fn canonical_absorbs_prefix_into_period() {
        let l = Lasso::new(0, vec![e(0, 0)], vec![e(0, 0)]).unwrap();
        let c = canonicalize_lasso(l).unwrap();
        assert_eq!(c, Lasso::new(0, vec![], vec![e(0, 0)]).unwrap());
    }

    #[test]
    fn canonical_reduces_period_power() {
        let l = Lasso::new(0, vec![], vec![e(0, 0), e(0, 0)]).unwrap();
        let c = canonicalize_lasso(l).unwrap();
        assert_eq!(c.period, vec![e(0, 0)]);
        assert!(c.prefix.is_empty());
    }

    #[test]
    fn canonical_keeps_already_canonical() {
        let l = Lasso::new(0, vec![p(0, 1)], vec![e(1, 1)]).unwrap();
        assert_eq!(canonicalize_lasso(l.clone()).unwrap(), l);
    }

    #[test]
    fn canonical_rejects_broken_contiguity() {
        let l = Lasso {
            initial: 0,
            prefix: vec![p(1, 1)],
            period: vec![e(1, 1)],
        };
        assert!(canonicalize_lasso(l).is_err());
        assert!(Lasso::new(0, vec![p(0, 1)], vec![e(1, 0)]).is_err());
    }

    #[test]
    fn close_adds_improper_incomplete_prefix() {
        let space = StateSpace::new(1).unwrap();
        let w = Window::new(2, 0, 1).unwrap();
        let t: BTreeSet<Trace> = [Trace::empty(0, Status::Terminated)].into();
        let (fin, inf) = close(&space, &t, &BTreeSet::new(), &w);
        let expect: BTreeSet<Trace> = [
            Trace::empty(0, Status::Terminated),
            Trace::empty(0, Status::Incomplete),
        ]
        .into();
        assert_eq!(fin, expect);
        assert!(inf.is_empty());
    }

    #[test]
    fn close_of_abort_is_everything() {
        let space = StateSpace::new(1).unwrap();
        let w = Window::new(1, 0, 1).unwrap();
        let t: BTreeSet<Trace> = [Trace::empty(0, Status::Aborted)].into();
        let (fin, inf) = close(&space, &t, &BTreeSet::new(), &w);
        // lengths 0 and 1, two one-step words, three statuses
        assert_eq!(fin.len(), 3 + 2 * 3);
        let lassos: BTreeSet<Lasso> = [
            Lasso::new(0, vec![], vec![p(0, 0)]).unwrap(),
            Lasso::new(0, vec![], vec![e(0, 0)]).unwrap(),
        ]
        .into();
        assert_eq!(inf, lassos);
    }

    #[test]
    fn close_unrolls_lassos() {
        let space = StateSpace::new(1).unwrap();
        let w = Window::new(2, 0, 1).unwrap();
        let l: BTreeSet<Lasso> = [Lasso::new(0, vec![], vec![e(0, 0)]).unwrap()].into();
        let (fin, inf) = close(&space, &BTreeSet::new(), &l, &w);
        let expect: BTreeSet<Trace> = [
            Trace::empty(0, Status::Incomplete),
            Trace::new(0, vec![e(0, 0)], Status::Incomplete).unwrap(),
            Trace::new(0, vec![e(0, 0), e(0, 0)], Status::Incomplete).unwrap(),
        ]
        .into();
        assert_eq!(fin, expect);
        assert_eq!(inf, l);
    }

    #[test]
    fn rendering_round_trips() {
        let t = Trace::new(0, vec![p(0, 1), e(1, 1)], Status::Terminated).unwrap();
        assert_eq!(t.to_string(), "0: p(0,1) e(1,1) !term");
        let l = Lasso::new(0, vec![p(0, 1)], vec![e(1, 1)]).unwrap();
        assert_eq!(l.to_string(), "0: p(0,1) [e(1,1)]^w");
        for o in [Observation::Finite(t), Observation::Infinite(l)] {
            assert_eq!(o.to_string().parse::<Observation>().unwrap(), o);
        }
        let empty = Trace::empty(1, Status::Incomplete);
        assert_eq!(empty.to_string(), "1: !inc");
        assert_eq!(
            "1: !inc".parse::<Observation>().unwrap(),
            Observation::Finite(empty)
        );
    }

    #[test]
    fn suffix_of_lasso_wraps_period() {
        let l = Lasso::new(0, vec![p(0, 1)], vec![e(1, 0), p(0, 1)]).unwrap();
        let s = l.suffix(2);
        assert_eq!(s.initial, 0);
        assert_eq!(s.period, vec![p(0, 1), e(1, 0)]);
        assert!(s.prefix.is_empty());
    }
}
