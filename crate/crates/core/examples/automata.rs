//! Size of the automata behind a few denotations.

use fairlab::denote::Evaluator;
use fairlab::state::{StateSpace, Window};
use fairlab::syntax::parse;

fn main() {
    let mut ev = Evaluator::new(StateSpace::new(2).unwrap(), Window::new(5, 3, 3).unwrap());
    for src in ["fair", "chaos ||f chaos", "(skip ; pi) ||f om(pi)", "inf(fin(eps) ; pi) && fair"] {
        let nfa = ev.automaton(&parse(src).unwrap()).unwrap();
        let edges: usize = nfa.nodes().iter().map(|n| n.edges.len()).sum();
        println!("{src:<30} {:>4} nodes {:>5} edges", nfa.len(), edges);
    }
}
