//! Window-exact trace semantics, refinement checking and a law checker for a
//! synchronous concurrent refinement algebra with fairness.

pub mod atomic;
pub mod automaton;
pub mod check;
pub mod crosscheck;
pub mod denote;
pub mod error;
pub mod gen;
pub mod laws;
pub mod oracle;
pub mod scenarios;
pub mod state;
pub mod syntax;
