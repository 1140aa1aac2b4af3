//! Random and exhaustive generation of command terms.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::atomic::AtomicCommand;
use crate::state::StateSpace;
use crate::syntax::{AtomExpr, Command};

pub const PRIMITIVE_LEAVES: [Command; 6] = [
    Command::Abort,
    Command::Magic,
    Command::Nil,
    Command::Atom(AtomExpr::Pi),
    Command::Atom(AtomExpr::Eps),
    Command::Atom(AtomExpr::Alpha),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unary {
    Fin,
    Om,
    Inf,
    Pow(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binary {
    Seq,
    Choice,
    Join,
    Par,
    Conj,
    FairPar,
}

impl Unary {
    pub fn apply(self, c: Command) -> Command {
        match self {
            Unary::Fin => Command::fin(c),
            Unary::Om => Command::om(c),
            Unary::Inf => Command::inf(c),
            Unary::Pow(i) => Command::pow(c, i),
        }
    }
}

impl Binary {
    pub fn apply(self, a: Command, b: Command) -> Command {
        match self {
            Binary::Seq => Command::seq(a, b),
            Binary::Choice => Command::Choice(vec![a, b]),
            Binary::Join => Command::join(a, b),
            Binary::Par => Command::par(a, b),
            Binary::Conj => Command::conj(a, b),
            Binary::FairPar => Command::fair_par(a, b),
        }
    }
}

/// Every term of depth at most `depth` built from the given leaves and
/// operators, shallower terms first.
pub fn enumerate(depth: usize, leaves: &[Command], unary: &[Unary], binary: &[Binary]) -> Vec<Command> {
    let mut all: Vec<Command> = leaves.to_vec();
    for _ in 0..depth {
        let prev = all.clone();
        let mut next = leaves.to_vec();
        for u in unary {
            next.extend(prev.iter().map(|c| u.apply(c.clone())));
        }
        for b in binary {
            for x in &prev {
                for y in &prev {
                    next.push(b.apply(x.clone(), y.clone()));
                }
            }
        }
        all = next;
    }
    all
}

/// A uniformly random set of steps.
pub fn random_atomic<R: Rng>(rng: &mut R, space: StateSpace) -> AtomicCommand {
    AtomicCommand::from_steps(space, space.all_steps().filter(|_| rng.gen_bool(0.5)))
}

fn random_atom_expr<R: Rng>(rng: &mut R, space: StateSpace) -> AtomExpr {
    let n = space.size() as u32;
    let pairs = |rng: &mut R| -> BTreeSet<(u32, u32)> {
        (0..rng.gen_range(0..=2))
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect()
    };
    let base = match rng.gen_range(0..5) {
        0 => AtomExpr::Pi,
        1 => AtomExpr::Eps,
        2 => AtomExpr::Alpha,
        3 => AtomExpr::Pgm(pairs(rng)),
        _ => AtomExpr::Env(pairs(rng)),
    };
    if rng.gen_bool(0.15) {
        AtomExpr::Not(Box::new(base))
    } else {
        base
    }
}

/// Knobs for [`random_command`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub depth: usize,
    /// Include `skip`, `chaos`, `term`, `fair` and `||f`.
    pub derived: bool,
    /// Include `pow`.
    pub powers: bool,
    /// Wide choices (up to four alternatives).
    pub wide_choice: bool,
}

pub fn random_command<R: Rng>(rng: &mut R, space: StateSpace, shape: Shape) -> Command {
    let leaf = |rng: &mut R| -> Command {
        let k = if shape.derived { 10 } else { 6 };
        match rng.gen_range(0..k) {
            0 => Command::Abort,
            1 => Command::Magic,
            2 => Command::Nil,
            3..=5 => Command::Atom(random_atom_expr(rng, space)),
            6 => Command::Skip,
            7 => Command::Chaos,
            8 => Command::Term,
            _ => Command::Fair,
        }
    };
    if shape.depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let sub = Shape {
        depth: shape.depth - 1,
        ..shape
    };
    let mut unary = vec![Unary::Fin, Unary::Om, Unary::Inf];
    if shape.powers {
        unary.push(Unary::Pow(rng.gen_range(0..3)));
    }
    let mut binary = vec![Binary::Seq, Binary::Choice, Binary::Join, Binary::Par, Binary::Conj];
    if shape.derived {
        binary.push(Binary::FairPar);
    }
    if rng.gen_range(0..unary.len() + binary.len()) < unary.len() {
        let u = *unary.choose(rng).unwrap();
        return u.apply(random_command(rng, space, sub));
    }
    match *binary.choose(rng).unwrap() {
        Binary::Choice if shape.wide_choice => {
            let n = rng.gen_range(2..=4);
            Command::Choice((0..n).map(|_| random_command(rng, space, sub)).collect())
        }
        b => b.apply(random_command(rng, space, sub), random_command(rng, space, sub)),
    }
}
