//! Catalog of algebraic laws, binding generators and a bounded checker.
//!
//! Each law is a pair (or chain) of term templates over quantified
//! variables. Templates are ordinary term syntax with `$name` holes and
//! finite choice comprehensions:
//!
//! ```text
//! {+ $x in $D : $c || $x}      choice over a command set (magic when empty)
//! {+ $k in 0..$B : pow($c, $k)} choice over 0, 1, .., B-1
//! ```
//!
//! Variable sorts follow the naming convention of the algebra: `a`, `b` are
//! atomic step commands, `i` is a natural, `C` a set of commands, `D` a
//! non-empty set of commands, `op` one of `||` / `&&`, anything else a
//! command. Binding `op` also binds `$Id` (`skip` or `chaos`) and `$iota`
//! (`eps` or `alpha`).

mod bindings;
mod catalog;
mod runner;
mod template;

pub use bindings::{generate_bindings, Bindings, Value};
pub use catalog::{catalog, find, mutants};
pub use runner::{
    check_instance, revalidate, run_law, run_suite, LawReport, Outcome, ReportStatus, SuiteConfig,
    SuiteReport, Violation,
};
pub use template::render;

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Command,
    Atomic,
    Natural,
    /// A finite set of commands, possibly empty unless `nonempty`.
    CommandSet { nonempty: bool },
    /// `||` or `&&`.
    SyncOp,
}

impl Sort {
    fn of_var(name: &str) -> Sort {
        match name {
            "op" => Sort::SyncOp,
            "i" => Sort::Natural,
            "C" => Sort::CommandSet { nonempty: false },
            "D" => Sort::CommandSet { nonempty: true },
            _ if name.starts_with('a') || name.starts_with('b') => Sort::Atomic,
            _ => Sort::Command,
        }
    }
}

/// Constructive generators that force a side condition to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Premise {
    /// `c := term ^ c'`, so `term ⊑ c`. (`term && c'` does not force it:
    /// weak conjunction is abort-strict, so `term && abort = abort`.)
    TermRefined,
    /// `c := c' ; skip`, so `c = c ; skip`.
    Healthy,
    /// `c := c' && fin(alpha)`.
    ConjFin,
    /// `v := w + d'` for the named `w`, so `v ⊑ w`.
    RefinesPair(&'static str),
    /// `c := c' + pow(alpha, i)` for the named natural `i`: every step
    /// sequence of length `i` completes in `c && pow(alpha, i)`.
    AlphaTotal(&'static str),
    /// Half of the samples take `x := om(c) ; (d ^ y)`.
    OmegaWitness,
    /// Half of the samples take `x := fin(c) ; (d + y)`.
    FiniteWitness,
}

impl Premise {
    pub fn tag(&self) -> &'static str {
        match self {
            Premise::TermRefined => "term-refined",
            Premise::Healthy => "healthy",
            Premise::ConjFin => "conj-fin",
            Premise::RefinesPair(_) => "refines-pair",
            Premise::AlphaTotal(_) => "alpha-total",
            Premise::OmegaWitness => "omega-witness",
            Premise::FiniteWitness => "finite-witness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawRelation {
    /// Every consecutive pair of sides is equal.
    Equal,
    /// `lhs ⊑ rhs`.
    Refines,
}

impl fmt::Display for LawRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LawRelation::Equal => "=",
            LawRelation::Refines => "⊑",
        })
    }
}

/// Values computed from the other bindings rather than sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derived {
    /// `$ab` := the atomic command `$a $op $b`, as a step set.
    AtomSync,
    /// `$B` := a bound past which extra iterations add nothing to the window.
    IterationBound,
}

#[derive(Debug, Clone)]
pub struct LawSpec {
    pub name: &'static str,
    pub quantifiers: Vec<(String, Sort)>,
    pub premises: Vec<(&'static str, Premise)>,
    /// `hypothesis.0 ⊑ hypothesis.1` must hold for the instance to count.
    pub hypothesis: Option<(&'static str, &'static str)>,
    pub sides: Vec<&'static str>,
    pub relation: LawRelation,
    pub derived: Vec<Derived>,
}

impl LawSpec {
    pub fn lhs(&self) -> &'static str {
        self.sides[0]
    }

    pub fn rhs(&self) -> &'static str {
        self.sides[self.sides.len() - 1]
    }

    pub fn is_closed(&self) -> bool {
        self.quantifiers.is_empty()
    }

    /// Laws whose premise is checked per sample rather than constructed.
    pub fn is_sampled_implication(&self) -> bool {
        self.hypothesis.is_some()
    }

    pub fn premise_tags(&self) -> Vec<&'static str> {
        self.premises.iter().map(|(_, p)| p.tag()).collect()
    }
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((h, k)) = self.hypothesis {
            write!(f, "{h} ⊑ {k}  ==>  ")?;
        }
        for (i, s) in self.sides.iter().enumerate() {
            if i > 0 {
                write!(f, "  {}  ", self.relation)?;
            }
            f.write_str(s)?;
        }
        Ok(())
    }
}
