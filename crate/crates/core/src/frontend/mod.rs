//! Surface syntax: signature (`.sig`), entailment (`.sle`) and strategy
//! (`.stg`) files, plus the assertion syntax of soundness conditions.

pub mod error;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod strategy;

pub use error::{ErrorKind, ParseError};
pub use parser::{
    parse_assertion, parse_condition, parse_entailment, parse_entailments, parse_formula, parse_heap, parse_pure,
    parse_signature, parse_strategies, parse_term, validate_strategies,
};
pub use printer::{print_assertion, print_entailment, print_program, print_strategy};
pub use strategy::{Action, Check, Operation, Pattern, Program, Strategy, DEFAULT_PRIORITY};
