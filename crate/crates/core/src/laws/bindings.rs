use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::template::{Env, Slot};
use super::{Derived, LawSpec, Premise, Sort};
use crate::atomic::{step_sync_conj, step_sync_par, AtomicCommand};
use crate::gen::{random_atomic, random_command, Shape};
use crate::state::{StateSpace, Window};
use crate::syntax::{parse, AtomExpr, Command, SyncOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Command(Command),
    /// An atomic step command: a term and the step set it denotes.
    Atomic(Command, AtomicCommand),
    Natural(u32),
    Set(Vec<Command>),
    Op(SyncOp),
}

fn op_symbol(op: SyncOp) -> &'static str {
    match op {
        SyncOp::Par => "||",
        SyncOp::Conj => "&&",
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Command(c) | Value::Atomic(c, _) => write!(f, "{c}"),
            Value::Natural(n) => write!(f, "{n}"),
            Value::Set(cs) => {
                f.write_str("{")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("}")
            }
            Value::Op(op) => f.write_str(op_symbol(*op)),
        }
    }
}

/// Values for the quantified variables of one law instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    pub values: Vec<(String, Value)>,
}

impl Bindings {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    fn command(&self, name: &str) -> Command {
        match self.get(name) {
            Some(Value::Command(c)) => c.clone(),
            other => panic!("`{name}` is not a command binding: {other:?}"),
        }
    }

    fn set(&mut self, name: &str, v: Value) {
        if let Some(slot) = self.values.iter_mut().find(|(n, _)| n == name) {
            slot.1 = v;
        } else {
            self.values.push((name.to_string(), v));
        }
    }

    /// Printed values, keyed by variable name.
    pub fn display_map(&self) -> BTreeMap<String, String> {
        self.values
            .iter()
            .map(|(n, v)| (n.clone(), v.to_string()))
            .collect()
    }

    /// Template environment including the derived names.
    pub fn env(&self, law: &LawSpec, window: Window) -> Env {
        let mut env = Env::new();
        for (name, v) in &self.values {
            let slot = match v {
                Value::Command(c) | Value::Atomic(c, _) => Slot::Term(c.to_string()),
                Value::Natural(n) => Slot::Nat(*n),
                Value::Set(cs) => Slot::Set(cs.iter().map(ToString::to_string).collect()),
                Value::Op(op) => Slot::Op(op_symbol(*op)),
            };
            env.insert(name.clone(), slot);
        }
        if let Some(Value::Op(op)) = self.get("op") {
            let (id, iota) = match op {
                SyncOp::Par => ("skip", "eps"),
                SyncOp::Conj => ("chaos", "alpha"),
            };
            env.insert("Id".into(), Slot::Term(id.into()));
            env.insert("iota".into(), Slot::Term(iota.into()));
        }
        for d in &law.derived {
            match d {
                Derived::AtomSync => {
                    let (Some(Value::Atomic(_, a)), Some(Value::Atomic(_, b)), Some(Value::Op(op))) =
                        (self.get("a"), self.get("b"), self.get("op"))
                    else {
                        panic!("{}: AtomSync needs a, b and op", law.name)
                    };
                    let sync = match op {
                        SyncOp::Par => step_sync_par,
                        SyncOp::Conj => step_sync_conj,
                    };
                    let ab = Command::from_atomic(&a.sync_with(b, sync));
                    env.insert("ab".into(), Slot::Term(ab.to_string()));
                }
                Derived::IterationBound => {
                    let bound = window.n.max(window.k + window.l) + 1;
                    env.insert("B".into(), Slot::Nat(bound as u32));
                }
            }
        }
        env
    }
}

const CORPUS: [&str; 13] = [
    "abort", "magic", "nil", "skip", "chaos", "term", "fair", "pi", "eps", "pi ; eps", "fin(pi)",
    "om(eps)", "inf(alpha)",
];

pub fn corpus() -> Vec<Command> {
    CORPUS.iter().map(|s| parse(s).expect("corpus term")).collect()
}

/// `pi`, `eps`, `alpha`, the empty step set, every single step and every
/// single-step complement.
pub fn curated_atomics(space: StateSpace) -> Vec<Command> {
    let mut out = vec![
        Command::pi(),
        Command::eps(),
        Command::alpha(),
        Command::Atom(AtomExpr::Pgm(Default::default())),
    ];
    let n = space.size() as u32;
    for program in [true, false] {
        for p in 0..n {
            for q in 0..n {
                let lit = std::iter::once((p, q)).collect();
                let atom = if program {
                    AtomExpr::Pgm(lit)
                } else {
                    AtomExpr::Env(lit)
                };
                out.push(Command::Atom(AtomExpr::Not(Box::new(atom.clone()))));
                out.push(Command::Atom(atom));
            }
        }
    }
    out
}

fn stable_hash(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// An endless, seeded stream of bindings for a law (a single empty binding
/// for closed laws).
///
/// Laws over atomic steps and operators alone first run through every
/// combination of [`curated_atomics`]; laws with a single command variable
/// first run through the fixed corpus.
pub struct BindingStream {
    law: LawSpec,
    space: StateSpace,
    depth: usize,
    rng: ChaCha8Rng,
    index: usize,
    atomics: Vec<(Command, AtomicCommand)>,
    corpus: Vec<Command>,
    exhaustive: usize,
}

pub fn generate_bindings(law: &LawSpec, space: StateSpace, depth: usize, seed: u64) -> BindingStream {
    let atomics: Vec<_> = curated_atomics(space)
        .into_iter()
        .map(|c| {
            let a = atomic_of(&c, space);
            (c, a)
        })
        .collect();
    let only_atomic = !law.is_closed()
        && law
            .quantifiers
            .iter()
            .all(|(_, s)| matches!(s, Sort::Atomic | Sort::SyncOp));
    let exhaustive = if only_atomic {
        law.quantifiers
            .iter()
            .map(|(_, s)| if *s == Sort::SyncOp { 2 } else { atomics.len() })
            .product()
    } else {
        0
    };
    BindingStream {
        law: law.clone(),
        space,
        depth,
        rng: ChaCha8Rng::seed_from_u64(seed ^ stable_hash(law.name)),
        index: 0,
        atomics,
        corpus: corpus(),
        exhaustive,
    }
}

fn atomic_of(c: &Command, space: StateSpace) -> AtomicCommand {
    match c {
        Command::Atom(e) => e.resolve(space).expect("curated atomics fit the space"),
        _ => unreachable!("curated atomics are literals"),
    }
}

impl BindingStream {
    /// Number of leading exhaustive bindings (zero unless the law ranges
    /// over atomic steps and operators only).
    pub fn exhaustive_len(&self) -> usize {
        self.exhaustive
    }

    fn random_term(&mut self, depth: usize) -> Command {
        if self.rng.gen_bool(0.3) {
            return self.corpus.choose(&mut self.rng).unwrap().clone();
        }
        let shape = Shape {
            depth,
            derived: true,
            powers: true,
            wide_choice: false,
        };
        random_command(&mut self.rng, self.space, shape)
    }

    fn random_atomic(&mut self) -> Value {
        if self.rng.gen_bool(0.6) {
            let (c, a) = self.atomics.choose(&mut self.rng).unwrap().clone();
            Value::Atomic(c, a)
        } else {
            let a = random_atomic(&mut self.rng, self.space);
            Value::Atomic(Command::from_atomic(&a), a)
        }
    }

    fn exhaustive_case(&self) -> Bindings {
        let mut rest = self.index;
        let mut b = Bindings::default();
        for (name, sort) in &self.law.quantifiers {
            let v = if *sort == Sort::SyncOp {
                let op = [SyncOp::Par, SyncOp::Conj][rest % 2];
                rest /= 2;
                Value::Op(op)
            } else {
                let (c, a) = self.atomics[rest % self.atomics.len()].clone();
                rest /= self.atomics.len();
                Value::Atomic(c, a)
            };
            b.set(name, v);
        }
        b
    }

    fn sample(&mut self) -> Bindings {
        let commands = self
            .law
            .quantifiers
            .iter()
            .filter(|(_, s)| *s == Sort::Command)
            .count();
        let mut b = Bindings::default();
        for (name, sort) in self.law.quantifiers.clone() {
            let v = match sort {
                Sort::Command if commands == 1 && self.index < self.corpus.len() => {
                    Value::Command(self.corpus[self.index].clone())
                }
                Sort::Command => Value::Command(self.random_term(self.depth)),
                Sort::Atomic => self.random_atomic(),
                Sort::Natural => Value::Natural(self.rng.gen_range(0..=3)),
                Sort::CommandSet { nonempty } => {
                    let n = self.rng.gen_range(if nonempty { 1 } else { 0 }..=3);
                    let depth = self.depth.saturating_sub(1);
                    Value::Set((0..n).map(|_| self.random_term(depth)).collect())
                }
                Sort::SyncOp => Value::Op([SyncOp::Par, SyncOp::Conj][self.index % 2]),
            };
            b.set(&name, v);
        }
        for (var, premise) in self.law.premises.clone() {
            let c = b.command(var);
            let forced = match premise {
                Premise::TermRefined => Command::join(Command::Term, c),
                Premise::Healthy => Command::seq(c, Command::Skip),
                Premise::ConjFin => Command::conj(c, Command::fin(Command::alpha())),
                Premise::RefinesPair(w) => Command::choice(vec![b.command(w), c]),
                Premise::AlphaTotal(i) => {
                    let Some(Value::Natural(i)) = b.get(i) else {
                        panic!("{}: `{i}` is not a natural", self.law.name)
                    };
                    Command::choice(vec![c, Command::pow(Command::alpha(), *i)])
                }
                Premise::OmegaWitness | Premise::FiniteWitness => {
                    if self.rng.gen_bool(0.5) {
                        c
                    } else {
                        let y = self.random_term(self.depth);
                        let (it, d) = (b.command("c"), b.command("d"));
                        if premise == Premise::OmegaWitness {
                            Command::seq(Command::om(it), Command::join(d, y))
                        } else {
                            Command::seq(Command::fin(it), Command::choice(vec![d, y]))
                        }
                    }
                }
            };
            b.set(var, Value::Command(forced));
        }
        b
    }
}

impl Iterator for BindingStream {
    type Item = Bindings;

    fn next(&mut self) -> Option<Bindings> {
        if self.law.is_closed() {
            self.index += 1;
            return (self.index == 1).then(Bindings::default);
        }
        let b = if self.index < self.exhaustive {
            self.exhaustive_case()
        } else {
            self.sample()
        };
        self.index += 1;
        Some(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{catalog, find, render};

    fn space(n: usize) -> StateSpace {
        StateSpace::new(n).unwrap()
    }

    #[test]
    fn every_template_renders_and_parses() {
        let w = Window::new(5, 3, 3).unwrap();
        for law in catalog() {
            for b in generate_bindings(&law, space(2), 2, 7).take(20) {
                let env = b.env(&law, w);
                let (h, k) = law.hypothesis.unzip();
                for t in law.sides.iter().chain(&h).chain(&k) {
                    let src = render(t, &env).unwrap_or_else(|e| panic!("{}: {e}", law.name));
                    parse(&src).unwrap_or_else(|e| panic!("{}: {src}: {e}", law.name));
                }
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let law = find("seq-assoc").unwrap();
        let a: Vec<_> = generate_bindings(&law, space(2), 3, 1).take(5).collect();
        let b: Vec<_> = generate_bindings(&law, space(2), 3, 1).take(5).collect();
        let c: Vec<_> = generate_bindings(&law, space(2), 3, 2).take(5).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 5);
        assert_eq!(a[0].values.len(), 3);
    }

    #[test]
    fn closed_laws_have_one_binding() {
        let law = find("term-fair").unwrap();
        assert_eq!(generate_bindings(&law, space(2), 3, 0).count(), 1);
    }

    #[test]
    fn nonempty_sets_stay_nonempty() {
        let law = find("fair-parallel-distrib").unwrap();
        for b in generate_bindings(&law, space(1), 2, 3).take(200) {
            match b.get("D") {
                Some(Value::Set(d)) => assert!(!d.is_empty() && d.len() <= 3),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn constructive_premises() {
        let law = find("sync-termination").unwrap();
        for b in generate_bindings(&law, space(2), 2, 0).take(10) {
            for v in ["c", "d"] {
                match b.get(v) {
                    Some(Value::Command(Command::Conj(_, f))) => {
                        assert_eq!(**f, Command::fin(Command::alpha()))
                    }
                    other => panic!("{other:?}"),
                }
            }
        }
        let law = find("fair-termination").unwrap();
        for b in generate_bindings(&law, space(2), 2, 0).take(10) {
            assert!(matches!(b.get("c"), Some(Value::Command(Command::Join(t, _))) if **t == Command::Term));
        }
    }

    #[test]
    fn atomic_laws_start_exhaustive() {
        let law = find("sync-inf").unwrap();
        let n = curated_atomics(space(1)).len();
        let all: Vec<_> = generate_bindings(&law, space(1), 2, 0).take(n * n * 2).collect();
        let mut seen: Vec<_> = all.iter().map(|b| b.display_map()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), n * n * 2);
    }
}
