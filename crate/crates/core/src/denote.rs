//! Evaluation of commands to window-bounded denotations.

use rustc_hash::FxHashMap as HashMap;
use std::rc::Rc;
use std::sync::Arc;

use crate::atomic::{step_sync_conj, step_sync_par};
use crate::automaton::{mark_of, scc, Nfa, Product, TooLarge};
use crate::error::EvalError;
use crate::state::{window_lassos, Lasso, Observation, State, StateSpace, Status, Step, Trace, Window};
use crate::syntax::Command;

/// Default bound on automaton nodes built for a single subterm.
pub const DEFAULT_CAP: usize = 200_000;

#[derive(Debug)]
struct WordNode {
    initial: State,
    parent: u32,
    step: Option<Step>,
    len: usize,
}

/// Index of every observation a window can hold over a state space.
///
/// Finite words are numbered breadth-first, so lower indices are never
/// longer; lassos are ordered by total length.
#[derive(Debug)]
pub struct Universe {
    space: StateSpace,
    window: Window,
    words: Vec<WordNode>,
    word_index: HashMap<(State, Vec<Step>), u32>,
    lassos: Vec<Lasso>,
    lasso_index: HashMap<Lasso, u32>,
    lasso_period: Vec<u32>,
    periods: Vec<Vec<Step>>,
}

impl Universe {
    pub fn new(space: StateSpace, window: Window) -> Self {
        let mut words = Vec::new();
        let mut word_index = HashMap::default();
        let mut frontier: Vec<(u32, Vec<Step>)> = Vec::new();
        for sigma in space.states() {
            let id = words.len() as u32;
            words.push(WordNode {
                initial: sigma,
                parent: u32::MAX,
                step: None,
                len: 0,
            });
            word_index.insert((sigma, Vec::new()), id);
            frontier.push((id, Vec::new()));
        }
        for len in 1..=window.n {
            let mut next = Vec::new();
            for (parent, w) in &frontier {
                let initial = words[*parent as usize].initial;
                let at = w.last().map_or(initial, |s: &Step| s.post);
                for step in space.steps_from(at) {
                    let id = words.len() as u32;
                    words.push(WordNode {
                        initial,
                        parent: *parent,
                        step: Some(step),
                        len,
                    });
                    let mut w2 = w.clone();
                    w2.push(step);
                    word_index.insert((initial, w2.clone()), id);
                    next.push((id, w2));
                }
            }
            frontier = next;
        }
        let mut lassos = window_lassos(&space, &window);
        lassos.sort_by(|a, b| {
            (a.prefix.len() + a.period.len(), a)
                .cmp(&(b.prefix.len() + b.period.len(), b))
        });
        let mut period_ids: HashMap<Vec<Step>, u32> = HashMap::default();
        let mut periods = Vec::new();
        let mut lasso_period = Vec::with_capacity(lassos.len());
        for l in &lassos {
            let id = *period_ids.entry(l.period.clone()).or_insert_with(|| {
                periods.push(l.period.clone());
                (periods.len() - 1) as u32
            });
            lasso_period.push(id);
        }
        let lasso_index = lassos
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        Universe {
            space,
            window,
            words,
            word_index,
            lassos,
            lasso_index,
            lasso_period,
            periods,
        }
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn window(&self) -> Window {
        self.window
    }

    fn word(&self, id: u32) -> (State, Vec<Step>) {
        let mut steps = Vec::with_capacity(self.words[id as usize].len);
        let mut cur = id;
        while let Some(s) = self.words[cur as usize].step {
            steps.push(s);
            cur = self.words[cur as usize].parent;
        }
        steps.reverse();
        (self.words[id as usize].initial, steps)
    }

    fn trace_bit(&self, bit: usize) -> Trace {
        let (initial, steps) = self.word((bit / 3) as u32);
        Trace {
            initial,
            steps,
            status: Status::ALL[bit % 3],
        }
    }

    fn finite_bits(&self) -> usize {
        self.words.len() * 3
    }

    fn observation_bit(&self, obs: &Observation) -> Option<(bool, usize)> {
        match obs {
            Observation::Finite(t) => {
                let id = *self.word_index.get(&(t.initial, t.steps.clone()))?;
                let s = Status::ALL.iter().position(|s| *s == t.status).unwrap();
                Some((false, id as usize * 3 + s))
            }
            Observation::Infinite(l) => Some((true, *self.lasso_index.get(l)? as usize)),
        }
    }
}

fn bitset(n: usize) -> Vec<u64> {
    vec![0; n.div_ceil(64)]
}

fn set_bit(v: &mut [u64], i: usize) {
    v[i / 64] |= 1 << (i % 64);
}

fn get_bit(v: &[u64], i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

fn ones(v: &[u64]) -> impl Iterator<Item = usize> + '_ {
    v.iter().enumerate().flat_map(|(w, &bits)| {
        (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
    })
}

/// The observations of a command that fit a window.
#[derive(Debug, Clone)]
pub struct Denotation {
    universe: Arc<Universe>,
    fin: Vec<u64>,
    inf: Vec<u64>,
}

impl PartialEq for Denotation {
    fn eq(&self, other: &Self) -> bool {
        self.fin == other.fin && self.inf == other.inf
    }
}

impl Eq for Denotation {}

impl Denotation {
    pub fn space(&self) -> StateSpace {
        self.universe.space
    }

    pub fn window(&self) -> Window {
        self.universe.window
    }

    /// Membership; observations outside the window are never members.
    pub fn contains(&self, obs: &Observation) -> bool {
        match self.universe.observation_bit(obs) {
            Some((false, i)) => get_bit(&self.fin, i),
            Some((true, i)) => get_bit(&self.inf, i),
            None => false,
        }
    }

    /// Finite traces, shortest first.
    pub fn traces(&self) -> impl Iterator<Item = Trace> + '_ {
        ones(&self.fin).map(|i| self.universe.trace_bit(i))
    }

    /// Lassos, shortest first.
    pub fn lassos(&self) -> impl Iterator<Item = &Lasso> + '_ {
        ones(&self.inf).map(|i| &self.universe.lassos[i])
    }

    pub fn trace_count(&self) -> usize {
        self.fin.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn lasso_count(&self) -> usize {
        self.inf.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Denotation) -> bool {
        let sub = |a: &[u64], b: &[u64]| a.iter().zip(b).all(|(x, y)| x & !y == 0);
        sub(&self.fin, &other.fin) && sub(&self.inf, &other.inf)
    }

    /// The shortest observation of `self` missing from `other`, preferring
    /// finite traces.
    pub fn first_missing(&self, other: &Denotation) -> Option<Observation> {
        let first = |a: &[u64], b: &[u64]| {
            a.iter()
                .zip(b)
                .enumerate()
                .find(|(_, (x, y))| *x & !*y != 0)
                .map(|(w, (x, y))| w * 64 + (x & !y).trailing_zeros() as usize)
        };
        if let Some(i) = first(&self.fin, &other.fin) {
            return Some(Observation::Finite(self.universe.trace_bit(i)));
        }
        first(&self.inf, &other.inf).map(|i| Observation::Infinite(self.universe.lassos[i].clone()))
    }

    /// Reads the window observations off an automaton returned by
    /// [`Nfa::finish`].
    pub fn from_automaton(nfa: &Nfa, universe: Arc<Universe>) -> Self {
        let u = &*universe;
        let mut fin = bitset(u.finite_bits());
        let mut inf = bitset(u.lassos.len());
        let mut stamp = vec![u32::MAX; nfa.len()];
        let mut round = 0u32;
        let mut advance = |set: &[u32], step: Step| -> Vec<u32> {
            round += 1;
            let mut out = Vec::new();
            for &q in set {
                for e in edges_on(nfa, q, step) {
                    if stamp[e.target as usize] != round {
                        stamp[e.target as usize] = round;
                        out.push(e.target);
                    }
                }
            }
            out
        };
        let mut subsets: Vec<Vec<u32>> = Vec::with_capacity(u.words.len());
        for (id, w) in u.words.iter().enumerate() {
            let set = match w.step {
                None => vec![nfa.init(w.initial)],
                Some(step) => {
                    let parent = &subsets[w.parent as usize];
                    if parent.is_empty() {
                        Vec::new()
                    } else {
                        advance(parent, step)
                    }
                }
            };
            let marks = set
                .iter()
                .fold(0, |m, &q| m | nfa.nodes()[q as usize].marks);
            for (k, s) in Status::ALL.iter().enumerate() {
                if marks & mark_of(*s) != 0 {
                    set_bit(&mut fin, id * 3 + k);
                }
            }
            subsets.push(set);
        }

        let mut starts: Vec<Vec<u32>> = Vec::with_capacity(u.lassos.len());
        let mut by_period: Vec<Vec<u32>> = vec![Vec::new(); u.periods.len()];
        for (i, l) in u.lassos.iter().enumerate() {
            let set = match u.word_index.get(&(l.initial, l.prefix.clone())) {
                Some(&id) => subsets[id as usize].clone(),
                None => {
                    let mut s = vec![nfa.init(l.initial)];
                    for step in &l.prefix {
                        s = advance(&s, *step);
                    }
                    s
                }
            };
            by_period[u.lasso_period[i] as usize].extend(&set);
            starts.push(set);
        }
        for from in &mut by_period {
            from.sort_unstable();
            from.dedup();
        }
        let accepting: Vec<Vec<bool>> = u
            .periods
            .iter()
            .zip(&by_period)
            .map(|(v, from)| accepts_period(nfa, v, from))
            .collect();
        for (i, set) in starts.iter().enumerate() {
            let acc = &accepting[u.lasso_period[i] as usize];
            if set.iter().any(|&q| acc[q as usize]) {
                set_bit(&mut inf, i);
            }
        }
        Denotation { universe, fin, inf }
    }
}

/// Edges of `q` labelled `step`; finished automata keep edges sorted by step.
fn edges_on(nfa: &Nfa, q: u32, step: Step) -> &[crate::automaton::Edge] {
    let edges = &nfa.nodes()[q as usize].edges;
    let lo = edges.partition_point(|e| e.step < step);
    let hi = lo + edges[lo..].partition_point(|e| e.step == step);
    &edges[lo..hi]
}

/// Nodes (among those reachable from `from`) from which the word `v^ω` has
/// an accepting run.
fn accepts_period(nfa: &Nfa, v: &[Step], from: &[u32]) -> Vec<bool> {
    let m = v.len();
    let mut result = vec![false; nfa.len()];
    if from.is_empty() {
        return result;
    }
    const NONE: u32 = u32::MAX;
    let mut ids: Vec<u32> = vec![NONE; nfa.len() * m];
    let mut keys: Vec<(u32, usize)> = Vec::new();
    let mut succ: Vec<Vec<(usize, bool)>> = Vec::new();
    for &q in from {
        if ids[q as usize * m] == NONE {
            ids[q as usize * m] = keys.len() as u32;
            keys.push((q, 0));
            succ.push(Vec::new());
        }
    }
    let mut i = 0;
    while i < keys.len() {
        let (q, pos) = keys[i];
        let mut out = Vec::new();
        for e in edges_on(nfa, q, v[pos]) {
            let next = (pos + 1) % m;
            let slot = e.target as usize * m + next;
            if ids[slot] == NONE {
                ids[slot] = keys.len() as u32;
                keys.push((e.target, next));
                succ.push(Vec::new());
            }
            out.push((ids[slot] as usize, e.acc));
        }
        succ[i] = out;
        i += 1;
    }
    let n = keys.len();
    let comp = scc(n, |x| succ[x].iter().map(|&(y, _)| y));
    let mut good = vec![false; n];
    for x in 0..n {
        for &(y, acc) in &succ[x] {
            if acc && comp[x] == comp[y] {
                good[comp[x]] = true;
            }
        }
    }
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, out) in succ.iter().enumerate() {
        for &(y, _) in out {
            rev[y].push(x);
        }
    }
    let mut live = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&x| good[comp[x]]).collect();
    for &x in &stack {
        live[x] = true;
    }
    while let Some(y) = stack.pop() {
        for &x in &rev[y] {
            if !live[x] {
                live[x] = true;
                stack.push(x);
            }
        }
    }
    for (x, &(q, pos)) in keys.iter().enumerate() {
        if pos == 0 && live[x] {
            result[q as usize] = true;
        }
    }
    result
}

/// Compiles commands to automata and denotations, memoising subterms.
pub struct Evaluator {
    space: StateSpace,
    cap: usize,
    universe: Arc<Universe>,
    cache: HashMap<Command, Rc<Nfa>>,
}

impl Evaluator {
    pub fn new(space: StateSpace, window: Window) -> Self {
        Self::with_cap(space, window, DEFAULT_CAP)
    }

    pub fn with_cap(space: StateSpace, window: Window, cap: usize) -> Self {
        Evaluator {
            space,
            cap,
            universe: Arc::new(Universe::new(space, window)),
            cache: HashMap::default(),
        }
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn window(&self) -> Window {
        self.universe.window
    }

    pub fn universe(&self) -> Arc<Universe> {
        self.universe.clone()
    }

    pub fn denote(&mut self, c: &Command) -> Result<Denotation, EvalError> {
        let nfa = self.automaton(c)?;
        Ok(Denotation::from_automaton(&nfa, self.universe.clone()))
    }

    /// The closed automaton of `c` (derived forms are expanded first).
    pub fn automaton(&mut self, c: &Command) -> Result<Rc<Nfa>, EvalError> {
        if self.cache.len() > 20_000 {
            self.cache.clear();
        }
        self.build(&c.expand())
    }

    fn build(&mut self, c: &Command) -> Result<Rc<Nfa>, EvalError> {
        if let Some(n) = self.cache.get(c) {
            return Ok(n.clone());
        }
        let space = self.space;
        let cap = self.cap;
        let too_large = |_: TooLarge| EvalError::ResourceExceeded {
            cap,
            subterm: c.to_string(),
        };
        let raw = match c {
            Command::Abort => Nfa::abort(space),
            Command::Magic => Nfa::magic(space),
            Command::Nil => Nfa::nil(space),
            Command::Atom(a) => Nfa::atomic(&a.resolve(space)?),
            Command::Seq(a, b) => {
                let (a, b) = (self.build(a)?, self.build(b)?);
                Nfa::seq(&a, &b)
            }
            Command::Choice(cs) => {
                let parts = cs
                    .iter()
                    .map(|x| self.build(x))
                    .collect::<Result<Vec<_>, _>>()?;
                let refs: Vec<&Nfa> = parts.iter().map(|p| &**p).collect();
                Nfa::union(space, &refs)
            }
            Command::Join(a, b) => {
                let (a, b) = (self.build(a)?, self.build(b)?);
                Nfa::product(&a, &b, Product::Join, cap).map_err(too_large)?
            }
            Command::Par(a, b) | Command::Conj(a, b) => {
                let sync = if matches!(c, Command::Par(..)) {
                    step_sync_par
                } else {
                    step_sync_conj
                };
                let (a, b) = (self.build(a)?, self.build(b)?);
                Nfa::product(&a, &b, Product::Sync(sync), cap).map_err(too_large)?
            }
            Command::Fin(a) => Nfa::iterate(&*self.build(a)?, false),
            Command::Om(a) => Nfa::iterate(&*self.build(a)?, true),
            Command::Inf(a) => {
                let om = Nfa::iterate(&*self.build(a)?, true)
                    .finish(cap)
                    .map_err(too_large)?;
                Nfa::seq(&om, &Nfa::magic(space))
            }
            Command::Pow(a, i) => {
                let a = self.build(a)?;
                let mut acc = Nfa::nil(space);
                for _ in 0..*i {
                    acc = Nfa::seq(&acc, &a).finish(cap).map_err(too_large)?;
                }
                acc
            }
            Command::Skip | Command::Chaos | Command::Term | Command::Fair | Command::FairPar(..) => {
                unreachable!("derived forms are expanded before building")
            }
        };
        let nfa = Rc::new(raw.finish(cap).map_err(too_large)?);
        self.cache.insert(c.clone(), nfa.clone());
        Ok(nfa)
    }
}

/// One-shot evaluation of a command over a space and window.
pub fn denote(c: &Command, space: StateSpace, window: Window) -> Result<Denotation, EvalError> {
    Evaluator::new(space, window).denote(c)
}
