//! Formulas, their evaluation, and brute-force interpretation checks.

pub mod ast;
pub mod eval;
pub mod oracle;
pub mod parse;
pub mod search;

pub use ast::{Formula, SoBinder, Term};
pub use eval::{defined_relation, eval_formula, Compiled, Model};
pub use oracle::{
    check_definable, check_expressibility, check_interpretation, compose_interpretations, verify_certificate,
    Certificate, Definability, Outcome,
};
pub use parse::{format_formula, parse_formula};
pub use search::{search_interpretation, SearchBounds, SearchOutcome};
