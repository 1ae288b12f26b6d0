//! First-order formulas over relational signatures: syntax tree, parser,
//! evaluator, disjunctive normal form and hom-basis expansion.

pub mod ast;
pub mod dnf;
pub mod eval;
pub mod hom_basis;
pub mod parser;

use thiserror::Error;

pub use ast::{Formula, Node, VarId, VarPool};
pub use dnf::{to_dnf, DEFAULT_DNF_BUDGET};
pub use eval::{count_satisfying, eval_at, eval_formula, satisfying_tuples, Evaluator};
pub use hom_basis::{qf_to_hom_basis, HomBasis};
pub use parser::parse_formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown symbol `{symbol}`{}", at(.position))]
    UnknownSymbol {
        symbol: String,
        position: Option<usize>,
    },
    #[error("symbol `{symbol}` has arity {expected}, used with {got} arguments{}", at(.position))]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
        position: Option<usize>,
    },
    #[error("undeclared variable `{name}`{}", at(.position))]
    UndeclaredVariable {
        name: String,
        position: Option<usize>,
    },
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("vertex {vertex} assigned to `{name}` is outside the domain of size {domain}")]
    VertexOutOfRange {
        name: String,
        vertex: usize,
        domain: usize,
    },
    #[error("expected {expected} values for the free variables, got {got}")]
    WrongValueCount { expected: usize, got: usize },
    #[error("assignment space of {needed} exceeds the budget of {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("formula has no free variables")]
    NoFreeVariables,
    #[error("normal form exceeds the budget of {0} nodes")]
    DnfBudget(usize),
}

fn at(position: &Option<usize>) -> String {
    match position {
        Some(p) => format!(" at position {p}"),
        None => String::new(),
    }
}
