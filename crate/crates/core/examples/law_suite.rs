//! Runs part of the law catalog and one mutated law.
//!
//! cargo run --release --example law_suite -- fair-parallel-commutes

use fairlab::laws::{catalog, find, revalidate, run_law, SuiteConfig};
use fairlab::oracle::Budget;
use fairlab::state::{StateSpace, Window};

fn main() {
    let space = StateSpace::new(1).unwrap();
    let mut cfg = SuiteConfig::new(space, Window::new(4, 2, 2).unwrap());
    cfg.samples = 30;

    let picked: Vec<_> = match std::env::args().nth(1) {
        Some(name) => vec![find(&name).unwrap_or_else(|| panic!("no law named {name}"))],
        None => catalog().into_iter().filter(|l| l.name.starts_with("fair")).collect(),
    };
    for law in &picked {
        let r = run_law(law, &cfg, false);
        println!("{:<32} {:?} x{}   {law}", r.law, r.status, r.instances);
    }

    let mutant = find("mutant-term-conj-chaos").unwrap();
    let r = run_law(&mutant, &cfg, true);
    println!("\n{}: {mutant}", mutant.name);
    for v in &r.violations {
        let ok = revalidate(v, space, Budget::default()).unwrap();
        println!("  refuted at {} ({} side), oracle agrees: {ok}", v.witness, v.witness_side);
    }
}
