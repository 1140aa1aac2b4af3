use std::collections::BTreeSet;

use crate::atomic::AtomicCommand;
use crate::error::EvalError;
use crate::state::{Step, StateSpace};

/// Atomic-step literal: `pi`, `eps`, `alpha`, `pgm{..}`, `env{..}`, `!lit`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomExpr {
    Pi,
    Eps,
    Alpha,
    Pgm(BTreeSet<(u32, u32)>),
    Env(BTreeSet<(u32, u32)>),
    Not(Box<AtomExpr>),
}

impl AtomExpr {
    pub fn resolve(&self, space: StateSpace) -> Result<AtomicCommand, EvalError> {
        let pairs = |set: &BTreeSet<(u32, u32)>, program: bool| {
            let mut steps = Vec::with_capacity(set.len());
            for &(a, b) in set {
                for s in [a, b] {
                    if s as usize >= space.size() {
                        return Err(EvalError::AtomOutOfSpace {
                            state: s,
                            size: space.size(),
                        });
                    }
                }
                let (a, b) = (a as u16, b as u16);
                steps.push(if program {
                    Step::program(a, b)
                } else {
                    Step::env(a, b)
                });
            }
            Ok(AtomicCommand::from_steps(space, steps))
        };
        Ok(match self {
            AtomExpr::Pi => AtomicCommand::pi(space),
            AtomExpr::Eps => AtomicCommand::eps(space),
            AtomExpr::Alpha => AtomicCommand::alpha(space),
            AtomExpr::Pgm(set) => pairs(set, true)?,
            AtomExpr::Env(set) => pairs(set, false)?,
            AtomExpr::Not(inner) => inner.resolve(space)?.negate(),
        })
    }
}

/// Command terms of the algebra.
///
/// `Choice` always holds at least two alternatives; use [`Command::choice`]
/// to build one from an arbitrary list. `Skip`, `Chaos`, `Term`, `Fair` and
/// `FairPar` are kept as written and expanded by [`Command::expand`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    Abort,
    Magic,
    Nil,
    Skip,
    Chaos,
    Term,
    Fair,
    Atom(AtomExpr),
    Seq(Box<Command>, Box<Command>),
    Choice(Vec<Command>),
    Join(Box<Command>, Box<Command>),
    Par(Box<Command>, Box<Command>),
    Conj(Box<Command>, Box<Command>),
    FairPar(Box<Command>, Box<Command>),
    Fin(Box<Command>),
    Om(Box<Command>),
    Inf(Box<Command>),
    Pow(Box<Command>, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncOp {
    Par,
    Conj,
}

impl Command {
    pub fn atom(a: AtomExpr) -> Self {
        Command::Atom(a)
    }

    pub fn pi() -> Self {
        Command::Atom(AtomExpr::Pi)
    }

    pub fn eps() -> Self {
        Command::Atom(AtomExpr::Eps)
    }

    pub fn alpha() -> Self {
        Command::Atom(AtomExpr::Alpha)
    }

    pub fn seq(a: Command, b: Command) -> Self {
        Command::Seq(Box::new(a), Box::new(b))
    }

    /// n-ary choice; the empty choice is `magic`, a singleton is its element.
    pub fn choice(mut alts: Vec<Command>) -> Self {
        match alts.len() {
            0 => Command::Magic,
            1 => alts.pop().unwrap(),
            _ => Command::Choice(alts),
        }
    }

    pub fn join(a: Command, b: Command) -> Self {
        Command::Join(Box::new(a), Box::new(b))
    }

    pub fn par(a: Command, b: Command) -> Self {
        Command::Par(Box::new(a), Box::new(b))
    }

    pub fn conj(a: Command, b: Command) -> Self {
        Command::Conj(Box::new(a), Box::new(b))
    }

    pub fn sync(op: SyncOp, a: Command, b: Command) -> Self {
        match op {
            SyncOp::Par => Self::par(a, b),
            SyncOp::Conj => Self::conj(a, b),
        }
    }

    pub fn fair_par(a: Command, b: Command) -> Self {
        Command::FairPar(Box::new(a), Box::new(b))
    }

    pub fn fin(c: Command) -> Self {
        Command::Fin(Box::new(c))
    }

    pub fn om(c: Command) -> Self {
        Command::Om(Box::new(c))
    }

    pub fn inf(c: Command) -> Self {
        Command::Inf(Box::new(c))
    }

    pub fn pow(c: Command, i: u32) -> Self {
        Command::Pow(Box::new(c), i)
    }

    /// An atomic command as a term: a choice of `pgm{..}` and `env{..}`
    /// literals (or `pgm{}` when empty).
    pub fn from_atomic(a: &AtomicCommand) -> Self {
        let mut pgm = BTreeSet::new();
        let mut env = BTreeSet::new();
        for s in a.steps() {
            let pair = (s.pre as u32, s.post as u32);
            if s.is_program() {
                pgm.insert(pair);
            } else {
                env.insert(pair);
            }
        }
        match (pgm.is_empty(), env.is_empty()) {
            (_, true) => Command::Atom(AtomExpr::Pgm(pgm)),
            (true, false) => Command::Atom(AtomExpr::Env(env)),
            (false, false) => Command::Choice(vec![
                Command::Atom(AtomExpr::Pgm(pgm)),
                Command::Atom(AtomExpr::Env(env)),
            ]),
        }
    }

    /// Operator depth: leaves have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Command::Abort
            | Command::Magic
            | Command::Nil
            | Command::Skip
            | Command::Chaos
            | Command::Term
            | Command::Fair
            | Command::Atom(_) => 0,
            Command::Fin(c) | Command::Om(c) | Command::Inf(c) | Command::Pow(c, _) => {
                1 + c.depth()
            }
            Command::Choice(cs) => 1 + cs.iter().map(Command::depth).max().unwrap_or(0),
            Command::Seq(a, b)
            | Command::Join(a, b)
            | Command::Par(a, b)
            | Command::Conj(a, b)
            | Command::FairPar(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Command::Fin(c) | Command::Om(c) | Command::Inf(c) | Command::Pow(c, _) => {
                1 + c.size()
            }
            Command::Choice(cs) => 1 + cs.iter().map(Command::size).sum::<usize>(),
            Command::Seq(a, b)
            | Command::Join(a, b)
            | Command::Par(a, b)
            | Command::Conj(a, b)
            | Command::FairPar(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Replaces the derived constants and fair-parallel by their definitions:
    ///
    /// ```text
    /// skip  = om(eps)
    /// chaos = om(alpha)
    /// term  = fin(alpha) ; om(eps)
    /// fair  = fin(eps) ; om(pi ; fin(eps))
    /// c ||f d = (c && fair) ; skip || (d && fair) ; skip
    /// ```
    pub fn expand(&self) -> Command {
        use Command as C;
        let b = |c: &Command| Box::new(c.expand());
        match self {
            C::Skip => C::om(C::eps()),
            C::Chaos => C::om(C::alpha()),
            C::Term => C::seq(C::fin(C::alpha()), C::om(C::eps())),
            C::Fair => C::seq(C::fin(C::eps()), C::om(C::seq(C::pi(), C::fin(C::eps())))),
            C::FairPar(x, y) => {
                let wrap = |c: &Command| C::seq(C::conj(c.expand(), C::Fair.expand()), C::Skip.expand());
                C::par(wrap(x), wrap(y))
            }
            C::Abort | C::Magic | C::Nil | C::Atom(_) => self.clone(),
            C::Seq(x, y) => C::Seq(b(x), b(y)),
            C::Join(x, y) => C::Join(b(x), b(y)),
            C::Par(x, y) => C::Par(b(x), b(y)),
            C::Conj(x, y) => C::Conj(b(x), b(y)),
            C::Choice(cs) => C::Choice(cs.iter().map(Command::expand).collect()),
            C::Fin(x) => C::Fin(b(x)),
            C::Om(x) => C::Om(b(x)),
            C::Inf(x) => C::Inf(b(x)),
            C::Pow(x, i) => C::Pow(b(x), *i),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choice_normalizes_small_lists() {
        assert_eq!(Command::choice(vec![]), Command::Magic);
        assert_eq!(Command::choice(vec![Command::Nil]), Command::Nil);
    }

    #[test]
    fn expansion_of_fair_parallel_is_structural() {
        let e = Command::fair_par(Command::Nil, Command::Nil).expand();
        let side = Command::seq(
            Command::conj(Command::Nil, Command::Fair.expand()),
            Command::om(Command::eps()),
        );
        assert_eq!(e, Command::par(side.clone(), side));
    }

    #[test]
    fn atom_out_of_space_is_reported() {
        let sp = StateSpace::new(1).unwrap();
        let a = AtomExpr::Pgm([(0, 1)].into());
        assert!(matches!(
            a.resolve(sp),
            Err(EvalError::AtomOutOfSpace { state: 1, size: 1 })
        ));
    }
}
