//! Parsing, printing and macro expansion of the term language.

use fairlab::syntax::parse;

fn main() {
    let sources = [
        "pi ; eps + alpha",
        "(pi ; eps) + alpha",
        "c0 := 1", // not a term
        "fin(pi) || om(eps) && chaos",
        "skip ||f term",
        "pi + eps + abort + (magic ^ nil)",
        "pow(pgm{(0,1)}, 3) ^ !env{(1,0)}",
    ];
    for src in sources {
        match parse(src) {
            Ok(c) => {
                let printed = c.to_string();
                assert_eq!(parse(&printed).unwrap(), c);
                println!("{src:<34} => {printed}  (depth {}, size {})", c.depth(), c.size());
                let core = c.expand();
                if core != c {
                    println!("{:<34}    expands to {core}", "");
                }
            }
            Err(e) => println!("{src:<34} => error at {e}"),
        }
    }
}
