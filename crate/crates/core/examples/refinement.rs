//! Equality and refinement up to a window, with oracle-checked witnesses.

use fairlab::check::{check_equal, check_refines, Side};
use fairlab::denote::Evaluator;
use fairlab::oracle::{oracle_member, Budget};
use fairlab::state::{StateSpace, Window};
use fairlab::syntax::parse;

fn main() {
    let space = StateSpace::new(2).unwrap();
    let mut ev = Evaluator::new(space, Window::new(5, 3, 3).unwrap());

    let equalities = [
        ("term && fair", "fin(alpha)"),
        ("skip && fair", "fin(eps)"),
        ("fair ; fair", "fair"),
        ("fair || chaos", "fair"),
        ("om(pi ; pi) || om(pi ; eps)", "nil"),
        ("fin(eps)", "om(eps)"),
    ];
    for (l, r) in equalities {
        let v = check_equal(&mut ev, &parse(l).unwrap(), &parse(r).unwrap()).unwrap();
        println!("{l} = {r}: {v}");
    }

    for (l, r) in [("chaos", "fair"), ("fair", "chaos"), ("pi", "pi ; magic")] {
        let (lc, rc) = (parse(l).unwrap(), parse(r).unwrap());
        let v = check_refines(&mut ev, &lc, &rc).unwrap();
        println!("{l} ⊑ {r}: {v}");
        if let Some(w) = &v.witness {
            let side = if w.side == Side::Left { &lc } else { &rc };
            let budget = Budget { unroll: 3, multiples: 3 };
            let member = oracle_member(side, space, &w.observation, budget).unwrap();
            println!("  oracle: witness in {} side = {member}", w.side);
        }
    }
}
