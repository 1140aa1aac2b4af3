//! Engine vs. the direct membership oracle on every term up to a depth.
//!
//! cargo run --release --example oracle_crosscheck -- 2

use fairlab::crosscheck::{compare_terms, exhaustive_terms};
use fairlab::oracle::Budget;
use fairlab::state::{StateSpace, Window};

fn main() {
    let depth = std::env::args().nth(1).map_or(1, |d| d.parse().expect("depth"));
    let terms = exhaustive_terms(depth);
    let space = StateSpace::new(1).unwrap();
    let window = Window::new(3, 1, 2).unwrap();
    let (r, total) = compare_terms(&terms, space, window, Budget::default(), 5).unwrap();
    println!(
        "{} terms x {} observations: {total} disagreements in {:.1?}",
        r.terms, r.observations, r.elapsed
    );
    for d in r.disagreements {
        println!("  {} at {}: engine {}", d.term, d.observation, d.engine);
    }
}
