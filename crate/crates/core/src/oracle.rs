//! A reference membership test that follows the trace semantics operator by
//! operator, with no automata involved.
//!
//! Finite-trace membership is exact. Lasso membership searches splitting
//! points and synchronisation partners only within the first
//! `prefix + unroll·period` steps and over period multiples up to
//! `multiples`, so it may miss members whose witnesses need more.

use std::rc::Rc;

use crate::atomic::{step_sync_conj, step_sync_par, sync_preimages, AtomicCommand};
use crate::error::EvalError;
use crate::state::{canonicalize_lasso, end_state, Lasso, Observation, State, StateSpace, Status, Step};
use crate::syntax::Command;

use rustc_hash::FxHashMap as HashMap;

const INLINE: usize = 16;

/// Memo key for a finite word query; words longer than [`INLINE`] steps go
/// to a spill table.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct WordKey {
    term: u32,
    sigma: State,
    tag: u8,
    len: u8,
    steps: [u16; INLINE],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub unroll: usize,
    pub multiples: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            unroll: 2,
            multiples: 2,
        }
    }
}

/// Term shape the oracle works on: macros expanded, `inf` and `pow`
/// rewritten into sequential compositions, atoms resolved. Subterms are
/// shared by id so answers carry over between commands.
#[derive(Clone)]
enum Term {
    Abort,
    Magic,
    Nil,
    Atom(Rc<AtomicCommand>),
    Seq(usize, usize),
    Choice(Rc<[usize]>),
    Join(usize, usize),
    Sync(fn(Step, Step) -> Option<Step>, usize, usize),
    Fin(usize),
    Om(usize),
}

fn sync_status_pairs(s: Status) -> &'static [(Status, Status)] {
    use Status::*;
    match s {
        Terminated => &[(Terminated, Terminated)],
        Aborted => &[(Aborted, Incomplete), (Incomplete, Aborted)],
        Incomplete => &[(Incomplete, Incomplete)],
    }
}

type Sync = fn(Step, Step) -> Option<Step>;
type Visit<'a> = dyn FnMut(&mut Oracle, &[Step], &[Step]) -> bool + 'a;

/// Membership oracle over one state space. Answers are memoised per
/// subterm, so checking many related commands in one session is cheap.
pub struct Oracle {
    space: StateSpace,
    budget: Budget,
    terms: Vec<Term>,
    ids: HashMap<Command, usize>,
    shapes: HashMap<TermKey, usize>,
    words: HashMap<WordKey, bool>,
    spill: HashMap<(usize, State, Vec<Step>, u8), bool>,
    inf_memo: HashMap<(usize, Lasso), bool>,
    /// Terms at or above `mark` are transient: their answers go to the
    /// scratch tables and are dropped together with them.
    mark: usize,
    scratch_words: HashMap<WordKey, bool>,
    scratch_inf: HashMap<(usize, Lasso), bool>,
    log: Vec<(Option<Command>, Option<TermKey>)>,
}

/// Structural identity of a lowered term, for sharing.
#[derive(Clone, PartialEq, Eq, Hash)]
enum TermKey {
    Abort,
    Magic,
    Nil,
    Atom(Vec<Step>),
    Seq(usize, usize),
    Choice(Vec<usize>),
    Join(usize, usize),
    Sync(bool, usize, usize),
    Fin(usize),
    Om(usize),
}

impl Oracle {
    pub fn new(space: StateSpace, budget: Budget) -> Self {
        Oracle {
            space,
            budget,
            terms: Vec::new(),
            ids: HashMap::default(),
            shapes: HashMap::default(),
            words: HashMap::default(),
            spill: HashMap::default(),
            inf_memo: HashMap::default(),
            mark: usize::MAX,
            scratch_words: HashMap::default(),
            scratch_inf: HashMap::default(),
            log: Vec::new(),
        }
    }

    /// Decides whether `obs` belongs to the denotation of `c`.
    pub fn member(&mut self, c: &Command, obs: &Observation) -> Result<bool, EvalError> {
        let t = self.lower(c)?;
        Ok(match obs {
            Observation::Finite(tr) => self.fin(t, tr.initial, &tr.steps, tr.status),
            Observation::Infinite(l) => self.inf(t, l),
        })
    }

    /// Membership of each observation, lowering `c` once.
    pub fn members(&mut self, c: &Command, obs: &[Observation]) -> Result<Vec<bool>, EvalError> {
        let t = self.lower(c)?;
        Ok(obs
            .iter()
            .map(|o| match o {
                Observation::Finite(tr) => self.fin(t, tr.initial, &tr.steps, tr.status),
                Observation::Infinite(l) => self.inf(t, l),
            })
            .collect())
    }

    /// Like [`Oracle::members`], but forgets what was learnt about `c`
    /// itself (its direct operands stay memoised). Keeps memory flat when
    /// checking many commands that share only their operands.
    pub fn members_transient(&mut self, c: &Command, obs: &[Observation]) -> Result<Vec<bool>, EvalError> {
        match c {
            Command::Seq(x, y)
            | Command::Join(x, y)
            | Command::Par(x, y)
            | Command::Conj(x, y)
            | Command::FairPar(x, y) => {
                self.lower(x)?;
                self.lower(y)?;
            }
            Command::Fin(x) | Command::Om(x) | Command::Inf(x) | Command::Pow(x, _) => {
                self.lower(x)?;
            }
            Command::Choice(xs) => {
                for x in xs {
                    self.lower(x)?;
                }
            }
            _ => {}
        }
        self.mark = self.terms.len();
        let r = self.members(c, obs);
        for (cmd, key) in self.log.drain(..) {
            if let Some(cmd) = cmd {
                self.ids.remove(&cmd);
            }
            if let Some(key) = key {
                self.shapes.remove(&key);
            }
        }
        let mark = self.mark;
        self.terms.truncate(mark);
        self.scratch_words.clear();
        self.scratch_inf.clear();
        if !self.spill.is_empty() {
            self.spill.retain(|k, _| k.0 < mark);
        }
        self.mark = usize::MAX;
        r
    }

    fn intern(&mut self, key: TermKey, term: Term) -> usize {
        if let Some(&i) = self.shapes.get(&key) {
            return i;
        }
        self.terms.push(term);
        if self.mark != usize::MAX {
            self.log.push((None, Some(key.clone())));
        }
        self.shapes.insert(key, self.terms.len() - 1);
        self.terms.len() - 1
    }

    fn lower(&mut self, c: &Command) -> Result<usize, EvalError> {
        if let Some(&i) = self.ids.get(c) {
            return Ok(i);
        }
        let i = match c {
            Command::Abort => self.intern(TermKey::Abort, Term::Abort),
            Command::Magic => self.intern(TermKey::Magic, Term::Magic),
            Command::Nil => self.intern(TermKey::Nil, Term::Nil),
            Command::Atom(a) => {
                let a = a.resolve(self.space)?;
                let key = TermKey::Atom(a.steps().iter().copied().collect());
                self.intern(key, Term::Atom(Rc::new(a)))
            }
            Command::Seq(x, y) => {
                let (x, y) = (self.lower(x)?, self.lower(y)?);
                self.intern(TermKey::Seq(x, y), Term::Seq(x, y))
            }
            Command::Choice(cs) => {
                let ids = cs.iter().map(|x| self.lower(x)).collect::<Result<Vec<_>, _>>()?;
                self.intern(TermKey::Choice(ids.clone()), Term::Choice(ids.into()))
            }
            Command::Join(x, y) => {
                let (x, y) = (self.lower(x)?, self.lower(y)?);
                self.intern(TermKey::Join(x, y), Term::Join(x, y))
            }
            Command::Par(x, y) | Command::Conj(x, y) => {
                let par = matches!(c, Command::Par(..));
                let f: Sync = if par { step_sync_par } else { step_sync_conj };
                let (x, y) = (self.lower(x)?, self.lower(y)?);
                self.intern(TermKey::Sync(par, x, y), Term::Sync(f, x, y))
            }
            Command::Fin(x) => {
                let x = self.lower(x)?;
                self.intern(TermKey::Fin(x), Term::Fin(x))
            }
            Command::Om(x) => {
                let x = self.lower(x)?;
                self.intern(TermKey::Om(x), Term::Om(x))
            }
            Command::Inf(x) => {
                let om = self.lower(&Command::om((**x).clone()))?;
                let magic = self.lower(&Command::Magic)?;
                self.intern(TermKey::Seq(om, magic), Term::Seq(om, magic))
            }
            Command::Pow(x, n) => {
                let x = self.lower(x)?;
                let mut t = self.lower(&Command::Nil)?;
                for _ in 0..*n {
                    t = self.intern(TermKey::Seq(t, x), Term::Seq(t, x));
                }
                t
            }
            Command::Skip | Command::Chaos | Command::Term | Command::Fair | Command::FairPar(..) => {
                self.lower(&c.expand())?
            }
        };
        if i >= self.mark {
            self.log.push((Some(c.clone()), None));
        }
        self.ids.insert(c.clone(), i);
        Ok(i)
    }

    fn word_key(&self, t: usize, sigma: State, w: &[Step], tag: u8) -> Option<WordKey> {
        if w.len() > INLINE {
            return None;
        }
        let mut steps = [0u16; INLINE];
        for (slot, s) in steps.iter_mut().zip(w) {
            *slot = self.space.step_index(*s) as u16;
        }
        Some(WordKey {
            term: t as u32,
            sigma,
            tag,
            len: w.len() as u8,
            steps,
        })
    }

    fn memo_get(&self, t: usize, sigma: State, w: &[Step], tag: u8) -> Option<bool> {
        match self.word_key(t, sigma, w, tag) {
            Some(k) if t >= self.mark => self.scratch_words.get(&k).copied(),
            Some(k) => self.words.get(&k).copied(),
            None => self.spill.get(&(t, sigma, w.to_vec(), tag)).copied(),
        }
    }

    fn memo_put(&mut self, t: usize, sigma: State, w: &[Step], tag: u8, r: bool) {
        match self.word_key(t, sigma, w, tag) {
            Some(k) if t >= self.mark => {
                self.scratch_words.insert(k, r);
            }
            Some(k) => {
                self.words.insert(k, r);
            }
            None => {
                self.spill.insert((t, sigma, w.to_vec(), tag), r);
            }
        }
    }

    fn fin(&mut self, t: usize, sigma: State, w: &[Step], s: Status) -> bool {
        let tag = s as u8;
        if let Some(r) = self.memo_get(t, sigma, w, tag) {
            return r;
        }
        let r = self.fin_uncached(t, sigma, w, s);
        self.memo_put(t, sigma, w, tag, r);
        r
    }

    fn fin_uncached(&mut self, t: usize, sigma: State, w: &[Step], s: Status) -> bool {
        match self.terms[t].clone() {
            Term::Abort => true,
            Term::Magic => w.is_empty() && s == Status::Incomplete,
            Term::Nil => w.is_empty() && s != Status::Aborted,
            Term::Atom(a) => match w {
                [] => s == Status::Incomplete,
                [x] => a.contains(x) && s != Status::Aborted,
                _ => false,
            },
            Term::Choice(cs) => cs.iter().any(|&c| self.fin(c, sigma, w, s)),
            Term::Join(c, d) => self.fin(c, sigma, w, s) && self.fin(d, sigma, w, s),
            Term::Seq(..) | Term::Sync(..) | Term::Fin(_) => {
                self.raw(t, sigma, w, s)
                    || (0..=w.len()).any(|k| self.raw(t, sigma, &w[..k], Status::Aborted))
            }
            Term::Om(c) => {
                self.fin_iter(c, sigma, w, s)
                    || (0..=w.len()).any(|k| self.fin_iter(c, sigma, &w[..k], Status::Aborted))
                    || (0..=w.len()).any(|k| self.silent_loop_after(c, sigma, &w[..k]))
            }
        }
    }

    /// `w` is a run of complete pieces ending where `c` can terminate
    /// without a step, from which the iteration may do anything.
    fn silent_loop_after(&mut self, c: usize, sigma: State, w: &[Step]) -> bool {
        self.pieces(c, sigma, w) && self.fin(c, end_state(sigma, w), &[], Status::Terminated)
    }

    /// Membership before abort-extension closure for the operators that
    /// need it.
    fn raw(&mut self, t: usize, sigma: State, w: &[Step], s: Status) -> bool {
        match self.terms[t].clone() {
            Term::Seq(c, d) => {
                (s != Status::Terminated && self.fin(c, sigma, w, s))
                    || (0..=w.len()).any(|j| {
                        self.fin(c, sigma, &w[..j], Status::Terminated)
                            && self.fin(d, end_state(sigma, &w[..j]), &w[j..], s)
                    })
            }
            Term::Sync(f, c, d) => {
                let mut visit = |o: &mut Self, w1: &[Step], w2: &[Step]| {
                    sync_status_pairs(s)
                        .iter()
                        .any(|&(s1, s2)| o.fin(c, sigma, w1, s1) && o.fin(d, sigma, w2, s2))
                };
                self.preimages(f, c, d, sigma, w, &mut Vec::new(), &mut Vec::new(), &mut visit)
            }
            Term::Fin(c) => self.fin_iter(c, sigma, w, s),
            _ => self.fin(t, sigma, w, s),
        }
    }

    /// Finitely many pieces of `c`, the last one arbitrary.
    fn fin_iter(&mut self, c: usize, sigma: State, w: &[Step], s: Status) -> bool {
        (w.is_empty() && s != Status::Aborted)
            || (0..=w.len()).any(|j| {
                self.pieces(c, sigma, &w[..j])
                    && self.fin(c, end_state(sigma, &w[..j]), &w[j..], s)
            })
    }

    /// `w` splits into non-empty terminated traces of `c`.
    fn pieces(&mut self, c: usize, sigma: State, w: &[Step]) -> bool {
        if w.is_empty() {
            return true;
        }
        const PIECES: u8 = 3;
        if let Some(r) = self.memo_get(c, sigma, w, PIECES) {
            return r;
        }
        let r = (1..=w.len()).any(|j| {
            self.fin(c, sigma, &w[..j], Status::Terminated)
                && self.pieces(c, end_state(sigma, &w[..j]), &w[j..])
        });
        self.memo_put(c, sigma, w, PIECES, r);
        r
    }

    /// Enumerates pairs of step words that synchronise to `w`, pruning
    /// pairs whose prefixes are not incomplete traces of the operands.
    /// Stops as soon as `visit` returns true.
    #[allow(clippy::too_many_arguments)]
    fn preimages(
        &mut self,
        f: Sync,
        c: usize,
        d: usize,
        sigma: State,
        w: &[Step],
        w1: &mut Vec<Step>,
        w2: &mut Vec<Step>,
        visit: &mut Visit<'_>,
    ) -> bool {
        let i = w1.len();
        if i == w.len() {
            return visit(self, w1, w2);
        }
        for (a, b) in sync_preimages(w[i], f) {
            w1.push(a);
            w2.push(b);
            let ok = self.fin(c, sigma, w1, Status::Incomplete)
                && self.fin(d, sigma, w2, Status::Incomplete)
                && self.preimages(f, c, d, sigma, w, w1, w2, visit);
            w1.pop();
            w2.pop();
            if ok {
                return true;
            }
        }
        false
    }

    fn cut_limit(&self, l: &Lasso) -> usize {
        l.prefix.len() + self.budget.unroll * l.period.len()
    }

    fn inf(&mut self, t: usize, l: &Lasso) -> bool {
        let l = canonicalize_lasso(l.clone()).expect("lasso shape checked by caller");
        let memo = if t >= self.mark {
            &self.scratch_inf
        } else {
            &self.inf_memo
        };
        let k = (t, l);
        if let Some(&r) = memo.get(&k) {
            return r;
        }
        let r = self.inf_uncached(t, &k.1);
        if t >= self.mark {
            self.scratch_inf.insert(k, r);
        } else {
            self.inf_memo.insert(k, r);
        }
        r
    }

    fn aborted_prefix(&mut self, t: usize, l: &Lasso) -> bool {
        (0..=self.cut_limit(l)).any(|k| self.raw(t, l.initial, &l.unroll(k), Status::Aborted))
    }

    fn inf_uncached(&mut self, t: usize, l: &Lasso) -> bool {
        let sigma = l.initial;
        let limit = self.cut_limit(l);
        match self.terms[t].clone() {
            Term::Abort => true,
            Term::Magic | Term::Nil | Term::Atom(_) => false,
            Term::Choice(cs) => cs.iter().any(|&c| self.inf(c, l)),
            Term::Join(c, d) => self.inf(c, l) && self.inf(d, l),
            Term::Seq(c, d) => {
                self.inf(c, l)
                    || (0..=limit).any(|k| {
                        self.fin(c, sigma, &l.unroll(k), Status::Terminated)
                            && self.inf(d, &l.suffix(k))
                    })
                    || self.aborted_prefix(t, l)
            }
            Term::Sync(f, c, d) => self.sync_lasso(f, c, d, l) || self.aborted_prefix(t, l),
            Term::Fin(c) => self.inf_iter(c, l) || self.aborted_prefix(t, l),
            Term::Om(c) => {
                self.inf_iter(c, l)
                    || (0..=limit).any(|k| self.fin_iter(c, sigma, &l.unroll(k), Status::Aborted))
                    || (0..=limit).any(|k| self.silent_loop_after(c, sigma, &l.unroll(k)))
                    || self.omega_pieces(c, l)
            }
        }
    }

    fn inf_iter(&mut self, c: usize, l: &Lasso) -> bool {
        (0..=self.cut_limit(l))
            .any(|k| self.pieces(c, l.initial, &l.unroll(k)) && self.inf(c, &l.suffix(k)))
    }

    /// Infinitely many non-empty terminated pieces: a cut in the periodic
    /// part followed by pieces spanning a whole number of periods.
    fn omega_pieces(&mut self, c: usize, l: &Lasso) -> bool {
        let p = l.period.len();
        for k in l.prefix.len()..=self.cut_limit(l) {
            if !self.pieces(c, l.initial, &l.unroll(k)) {
                continue;
            }
            let rest = l.suffix(k);
            for m in 1..=self.budget.multiples {
                if self.pieces(c, rest.initial, &rest.unroll(m * p)) {
                    return true;
                }
            }
        }
        false
    }

    fn sync_lasso(&mut self, f: Sync, c: usize, d: usize, l: &Lasso) -> bool {
        let p = l.period.len();
        for j in 0..=self.budget.unroll {
            let k = l.prefix.len() + j * p;
            for m in 1..=self.budget.multiples {
                let w = l.unroll(k + m * p);
                let mk = |v: &[Step]| Lasso {
                    initial: l.initial,
                    prefix: v[..k].to_vec(),
                    period: v[k..].to_vec(),
                };
                let mut visit =
                    |o: &mut Self, w1: &[Step], w2: &[Step]| o.inf(c, &mk(w1)) && o.inf(d, &mk(w2));
                if self.preimages(f, c, d, l.initial, &w, &mut Vec::new(), &mut Vec::new(), &mut visit) {
                    return true;
                }
            }
        }
        false
    }
}

/// One-shot membership test.
pub fn oracle_member(
    c: &Command,
    space: StateSpace,
    obs: &Observation,
    budget: Budget,
) -> Result<bool, EvalError> {
    Oracle::new(space, budget).member(c, obs)
}
