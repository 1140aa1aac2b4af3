use std::collections::BTreeSet;
use std::fmt;

use super::ast::{AtomExpr, Command};

// Binding levels, loosest first.
const CHOICE: u8 = 0;
const JOIN: u8 = 1;
const SYNC: u8 = 2;
const SEQ: u8 = 3;
const ATOM: u8 = 4;

fn level(c: &Command) -> u8 {
    match c {
        Command::Choice(cs) if cs.len() >= 2 => CHOICE,
        Command::Join(..) => JOIN,
        Command::Par(..) | Command::Conj(..) | Command::FairPar(..) => SYNC,
        Command::Seq(..) => SEQ,
        _ => ATOM,
    }
}

fn sync_token(c: &Command) -> Option<&'static str> {
    match c {
        Command::Par(..) => Some("||"),
        Command::Conj(..) => Some("&&"),
        Command::FairPar(..) => Some("||f"),
        _ => None,
    }
}

fn pairs(f: &mut fmt::Formatter<'_>, set: &BTreeSet<(u32, u32)>) -> fmt::Result {
    f.write_str("{")?;
    for (i, (a, b)) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "({a},{b})")?;
    }
    f.write_str("}")
}

impl fmt::Display for AtomExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomExpr::Pi => f.write_str("pi"),
            AtomExpr::Eps => f.write_str("eps"),
            AtomExpr::Alpha => f.write_str("alpha"),
            AtomExpr::Pgm(s) => {
                f.write_str("pgm")?;
                pairs(f, s)
            }
            AtomExpr::Env(s) => {
                f.write_str("env")?;
                pairs(f, s)
            }
            AtomExpr::Not(a) => write!(f, "!{a}"),
        }
    }
}

struct Wrapped<'a> {
    c: &'a Command,
    paren: bool,
}

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.paren {
            write!(f, "({})", self.c)
        } else {
            write!(f, "{}", self.c)
        }
    }
}

fn at_least(c: &Command, min: u8) -> Wrapped<'_> {
    Wrapped {
        c,
        paren: level(c) < min,
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Abort => f.write_str("abort"),
            Command::Magic => f.write_str("magic"),
            Command::Nil => f.write_str("nil"),
            Command::Skip => f.write_str("skip"),
            Command::Chaos => f.write_str("chaos"),
            Command::Term => f.write_str("term"),
            Command::Fair => f.write_str("fair"),
            Command::Atom(a) => write!(f, "{a}"),
            Command::Choice(cs) => match cs.as_slice() {
                [] => f.write_str("magic"),
                [only] => write!(f, "{only}"),
                _ => {
                    for (i, c) in cs.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" + ")?;
                        }
                        write!(f, "{}", at_least(c, JOIN))?;
                    }
                    Ok(())
                }
            },
            Command::Join(a, b) => write!(f, "{} ^ {}", at_least(a, JOIN), at_least(b, SYNC)),
            Command::Par(a, b) | Command::Conj(a, b) | Command::FairPar(a, b) => {
                let op = sync_token(self).unwrap();
                let left = Wrapped {
                    c: a,
                    paren: level(a) < SYNC || sync_token(a).is_some_and(|t| t != op),
                };
                write!(f, "{left} {op} {}", at_least(b, SEQ))
            }
            Command::Seq(a, b) => write!(f, "{} ; {}", at_least(a, SEQ), at_least(b, ATOM)),
            Command::Fin(c) => write!(f, "fin({c})"),
            Command::Om(c) => write!(f, "om({c})"),
            Command::Inf(c) => write!(f, "inf({c})"),
            Command::Pow(c, i) => write!(f, "pow({c}, {i})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;

    fn roundtrip(src: &str, printed: &str) {
        let c = parse(src).unwrap();
        assert_eq!(c.to_string(), printed);
        assert_eq!(parse(printed).unwrap(), c);
    }

    #[test]
    fn minimal_parentheses() {
        roundtrip("(pi ; eps) ; nil", "pi ; eps ; nil");
        roundtrip("pi ; (eps ; nil)", "pi ; (eps ; nil)");
        roundtrip("(nil || nil) && nil", "(nil || nil) && nil");
        roundtrip("(nil + pi) + eps", "(nil + pi) + eps");
        roundtrip("nil + (pi ^ eps)", "nil + pi ^ eps");
    }

    #[test]
    fn literals() {
        roundtrip("!!pgm{(1,0),(0,1)}", "!!pgm{(0,1), (1,0)}");
        roundtrip("env{}", "env{}");
        roundtrip("pow(fin(pi), 2)", "pow(fin(pi), 2)");
    }
}
