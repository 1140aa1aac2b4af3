use thiserror::Error;

/// Violations of a data-structure precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("state space size must be in 1..=64, got {0}")]
    StateSpaceSize(usize),
    #[error("step outside the state space: {0}")]
    StepOutOfSpace(String),
    #[error("steps are not state-contiguous: {0}")]
    NotContiguous(String),
    #[error("lasso period is empty")]
    EmptyPeriod,
    #[error("lasso period is not a state cycle: {0}")]
    PeriodNotCycle(String),
    #[error("window lasso period bound must be at least 1")]
    WindowPeriod,
    #[error("{0}")]
    Malformed(String),
}

/// A syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("state {state} in atomic literal is outside a space of {size} states")]
    AtomOutOfSpace { state: u32, size: usize },
    #[error("resource cap of {cap} automaton states exceeded while evaluating `{subterm}`")]
    ResourceExceeded { cap: usize, subterm: String },
    #[error("unbound template variable `${0}`")]
    UnboundVariable(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
