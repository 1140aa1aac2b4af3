//! Pre-emption, fairness and infeasibility on a shared flag x ∈ {0,1}.

use fairlab::scenarios::{all_examples, run_example};
use fairlab::state::Window;

fn main() {
    let window = Window::new(5, 3, 3).unwrap();
    for case in all_examples() {
        let o = run_example(&case, window).unwrap();
        println!("{}: {}", case.name, case.program);
        println!("  term: {}", case.ast);
        println!("  expect {:?} -> {}", o.expected, if o.passed { "ok" } else { "FAILED" });
        println!("  {:?}", o.diagnostics);
        if let Some(l) = &o.preempting_lasso {
            println!("  x stays 0 forever: {l}");
        }
    }
}
