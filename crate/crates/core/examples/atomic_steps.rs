//! Atomic step commands as step sets, and how they synchronise.

use fairlab::atomic::{step_sync_conj, step_sync_par, AtomicCommand};
use fairlab::state::{StateSpace, Step};
use fairlab::syntax::{parse, Command};

fn show(name: &str, a: &AtomicCommand) {
    let steps: Vec<String> = a.steps().iter().map(Step::to_string).collect();
    println!("{name:<18} {{{}}}", steps.join(", "));
}

fn main() {
    let space = StateSpace::new(2).unwrap();
    let pi = AtomicCommand::pi(space);
    let eps = AtomicCommand::eps(space);
    let alpha = AtomicCommand::alpha(space);

    show("pi", &pi);
    show("eps", &eps);
    show("!pi", &pi.negate());
    show("pi || eps", &pi.sync_with(&eps, step_sync_par));
    show("pi || pi", &pi.sync_with(&pi, step_sync_par));
    show("eps && alpha", &eps.sync_with(&alpha, step_sync_conj));

    // Literal step sets.
    for src in ["pgm{(0,1)}", "env{(1,1)}", "!pgm{(0,0),(1,1)}"] {
        let Command::Atom(e) = parse(src).unwrap() else { unreachable!() };
        show(src, &e.resolve(space).unwrap());
    }
}
