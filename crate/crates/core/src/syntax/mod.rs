//! Command terms: AST, parser and printer.

mod ast;
mod parser;
mod printer;

pub use ast::{AtomExpr, Command, SyncOp};
pub use parser::parse;
