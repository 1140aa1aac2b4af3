//! Recursive-descent parser for the command term language.
//!
//! ```text
//! cmd    := choice
//! choice := join ("+" join)*
//! join   := sync ("^" sync)*
//! sync   := seq (("||" | "&&" | "||f") seq)*     one operator per level
//! seq    := atom (";" atom)*
//! atom   := "abort" | "magic" | "nil" | "skip" | "chaos" | "term" | "fair"
//!         | atomlit | "!" atomlit
//!         | "fin(" cmd ")" | "om(" cmd ")" | "inf(" cmd ")"
//!         | "pow(" cmd "," nat ")" | "(" cmd ")"
//! atomlit:= ("pgm" | "env") "{" pairs "}" | "pi" | "eps" | "alpha"
//! ```

use std::collections::BTreeSet;

use super::ast::{AtomExpr, Command};
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Plus,
    Caret,
    Semi,
    Par,
    Conj,
    FairPar,
    Bang,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Par => "`||`".into(),
            Tok::Conj => "`&&`".into(),
            Tok::FairPar => "`||f`".into(),
            Tok::Bang => "`!`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let ident_char = |ch: char| ch.is_ascii_alphanumeric() || ch == '_';
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && ident_char(chars[j]) {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = text
                .parse()
                .map_err(|_| err(l0, c0, format!("number `{text}` is too large")))?;
            (Tok::Nat(n), j - i)
        } else {
            let next = chars.get(i + 1).copied();
            match (c, next) {
                ('|', Some('|')) => {
                    let f = chars.get(i + 2) == Some(&'f')
                        && !chars.get(i + 3).is_some_and(|&ch| ident_char(ch));
                    if f {
                        (Tok::FairPar, 3)
                    } else {
                        (Tok::Par, 2)
                    }
                }
                ('&', Some('&')) => (Tok::Conj, 2),
                ('+', _) => (Tok::Plus, 1),
                ('^', _) => (Tok::Caret, 1),
                (';', _) => (Tok::Semi, 1),
                ('!', _) => (Tok::Bang, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                _ => return Err(err(l0, c0, format!("unexpected character `{c}`"))),
            }
        };
        out.push(Spanned {
            tok,
            line: l0,
            column: c0,
        });
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn choice(&mut self) -> Result<Command, ParseError> {
        let mut alts = vec![self.join()?];
        while *self.peek() == Tok::Plus {
            self.bump();
            alts.push(self.join()?);
        }
        Ok(Command::choice(alts))
    }

    fn join(&mut self) -> Result<Command, ParseError> {
        let mut lhs = self.sync()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            lhs = Command::join(lhs, self.sync()?);
        }
        Ok(lhs)
    }

    fn sync(&mut self) -> Result<Command, ParseError> {
        let mut lhs = self.seq()?;
        let mut op: Option<Tok> = None;
        while matches!(self.peek(), Tok::Par | Tok::Conj | Tok::FairPar) {
            let t = self.peek().clone();
            if let Some(prev) = &op {
                if *prev != t {
                    return Err(self.error_here(format!(
                        "cannot mix {} and {} without parentheses",
                        prev.describe(),
                        t.describe()
                    )));
                }
            }
            self.bump();
            let rhs = self.seq()?;
            lhs = match t {
                Tok::Par => Command::par(lhs, rhs),
                Tok::Conj => Command::conj(lhs, rhs),
                _ => Command::fair_par(lhs, rhs),
            };
            op = Some(t);
        }
        Ok(lhs)
    }

    fn seq(&mut self) -> Result<Command, ParseError> {
        let mut lhs = self.atom()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            lhs = Command::seq(lhs, self.atom()?);
        }
        Ok(lhs)
    }

    fn pairs(&mut self) -> Result<BTreeSet<(u32, u32)>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut set = BTreeSet::new();
        if *self.peek() == Tok::RBrace {
            self.bump();
            return Ok(set);
        }
        loop {
            self.expect(Tok::LParen)?;
            let a = self.state_nat()?;
            self.expect(Tok::Comma)?;
            let b = self.state_nat()?;
            self.expect(Tok::RParen)?;
            set.insert((a, b));
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    return Ok(set);
                }
                _ => {
                    return Err(self.error_here(format!(
                        "expected `,` or `}}`, found {}",
                        self.peek().describe()
                    )))
                }
            }
        }
    }

    fn state_nat(&mut self) -> Result<u32, ParseError> {
        match self.peek().clone() {
            Tok::Nat(n) if n <= u32::MAX as u64 => {
                self.bump();
                Ok(n as u32)
            }
            t => Err(self.error_here(format!("expected a state number, found {}", t.describe()))),
        }
    }

    fn atom_lit(&mut self) -> Result<AtomExpr, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(AtomExpr::Not(Box::new(self.atom_lit()?)));
        }
        let name = match self.peek() {
            Tok::Ident(s) => s.clone(),
            t => {
                return Err(self.error_here(format!(
                    "expected an atomic literal, found {}",
                    t.describe()
                )))
            }
        };
        match name.as_str() {
            "pi" | "eps" | "alpha" => {
                self.bump();
                Ok(match name.as_str() {
                    "pi" => AtomExpr::Pi,
                    "eps" => AtomExpr::Eps,
                    _ => AtomExpr::Alpha,
                })
            }
            "pgm" | "env" => {
                self.bump();
                let set = self.pairs()?;
                Ok(if name == "pgm" {
                    AtomExpr::Pgm(set)
                } else {
                    AtomExpr::Env(set)
                })
            }
            _ => Err(self.error_here(format!("`{name}` is not an atomic literal"))),
        }
    }

    fn unary(&mut self) -> Result<Command, ParseError> {
        self.expect(Tok::LParen)?;
        let c = self.choice()?;
        self.expect(Tok::RParen)?;
        Ok(c)
    }

    fn atom(&mut self) -> Result<Command, ParseError> {
        match self.peek().clone() {
            Tok::Bang => Ok(Command::Atom(self.atom_lit()?)),
            Tok::LParen => self.unary(),
            Tok::Ident(name) => match name.as_str() {
                "abort" | "magic" | "nil" | "skip" | "chaos" | "term" | "fair" => {
                    self.bump();
                    Ok(match name.as_str() {
                        "abort" => Command::Abort,
                        "magic" => Command::Magic,
                        "nil" => Command::Nil,
                        "skip" => Command::Skip,
                        "chaos" => Command::Chaos,
                        "term" => Command::Term,
                        _ => Command::Fair,
                    })
                }
                "pi" | "eps" | "alpha" | "pgm" | "env" => Ok(Command::Atom(self.atom_lit()?)),
                "fin" | "om" | "inf" => {
                    self.bump();
                    let c = self.unary()?;
                    Ok(match name.as_str() {
                        "fin" => Command::fin(c),
                        "om" => Command::om(c),
                        _ => Command::inf(c),
                    })
                }
                "pow" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let c = self.choice()?;
                    self.expect(Tok::Comma)?;
                    let i = match self.peek().clone() {
                        Tok::Nat(n) if n <= u32::MAX as u64 => {
                            self.bump();
                            n as u32
                        }
                        t => {
                            return Err(self.error_here(format!(
                                "exponent must be a natural number literal, found {}",
                                t.describe()
                            )))
                        }
                    };
                    self.expect(Tok::RParen)?;
                    Ok(Command::pow(c, i))
                }
                _ => Err(self.error_here(format!("unknown identifier `{name}`"))),
            },
            t => Err(self.error_here(format!("expected a command, found {}", t.describe()))),
        }
    }
}

/// Parses a command term.
pub fn parse(src: &str) -> Result<Command, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let c = p.choice()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error_here(format!("unexpected {}", p.peek().describe())));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_of_atoms() {
        assert_eq!(
            parse("pi ; eps").unwrap(),
            Command::seq(Command::pi(), Command::eps())
        );
    }

    #[test]
    fn fair_spelled_out_equals_expansion() {
        let c = parse("fin(eps) ; om(pi ; fin(eps))").unwrap();
        assert_eq!(c, Command::Fair.expand());
    }

    #[test]
    fn unknown_identifier_points_at_token() {
        let e = parse("nil || p").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
        assert!(e.message.contains("`p`"), "{e}");
    }

    #[test]
    fn mixing_sync_operators_is_rejected() {
        let e = parse("nil || nil && nil").unwrap_err();
        assert!(e.message.contains("cannot mix"), "{e}");
        assert!(parse("(nil || nil) && nil").is_ok());
        assert!(parse("nil || nil || nil").is_ok());
    }

    #[test]
    fn precedence_levels() {
        let c = parse("nil + pi ; eps || skip ^ chaos").unwrap();
        let expect = Command::choice(vec![
            Command::Nil,
            Command::join(
                Command::par(Command::seq(Command::pi(), Command::eps()), Command::Skip),
                Command::Chaos,
            ),
        ]);
        assert_eq!(c, expect);
    }

    #[test]
    fn fair_par_token_needs_boundary() {
        assert_eq!(
            parse("nil ||f nil").unwrap(),
            Command::fair_par(Command::Nil, Command::Nil)
        );
        assert_eq!(
            parse("nil ||fair").unwrap(),
            Command::par(Command::Nil, Command::Fair)
        );
    }

    #[test]
    fn literals_and_negation() {
        let c = parse("!pgm{(0,1), (1,1)} ; env{}").unwrap();
        assert_eq!(
            c,
            Command::seq(
                Command::Atom(AtomExpr::Not(Box::new(AtomExpr::Pgm([(0, 1), (1, 1)].into())))),
                Command::Atom(AtomExpr::Env(BTreeSet::new())),
            )
        );
        assert!(parse("!nil").is_err());
    }

    #[test]
    fn pow_exponent_must_be_literal() {
        assert_eq!(
            parse("pow(pi, 3)").unwrap(),
            Command::pow(Command::pi(), 3)
        );
        let e = parse("pow(pi, nil)").unwrap_err();
        assert!(e.message.contains("exponent"), "{e}");
    }

    #[test]
    fn positions_track_lines() {
        let e = parse("nil ;\n  )").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }
}
