//! Window denotation of a few commands: counts, diagnostics and members.
//!
//! cargo run --example denote -- "om(pi) ; abort"

use fairlab::check::diagnostics;
use fairlab::denote::Evaluator;
use fairlab::state::{StateSpace, Status, Window};
use fairlab::syntax::parse;

fn main() {
    let space = StateSpace::new(1).unwrap();
    let window = Window::new(3, 1, 2).unwrap();
    let mut ev = Evaluator::new(space, window);

    let terms: Vec<String> = match std::env::args().nth(1) {
        Some(t) => vec![t],
        None => ["skip", "term", "fair", "term && fair", "om(nil)", "pi || eps"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    for src in terms {
        let c = parse(&src).expect("term");
        let d = ev.denote(&c).expect("denotation");
        let ended = |s| d.traces().filter(|t| t.status == s).count();
        println!(
            "{c}: {} terminated, {} aborted, {} incomplete, {} lassos",
            ended(Status::Terminated),
            ended(Status::Aborted),
            ended(Status::Incomplete),
            d.lasso_count()
        );
        println!("  {:?}", diagnostics(&d));
        for t in d.traces().filter(|t| t.status != Status::Incomplete) {
            println!("  {t}");
        }
        for l in d.lassos() {
            println!("  {l}");
        }
    }
}
