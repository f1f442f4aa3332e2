use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    DuplicateDeclaration,
    UnknownIdentifier,
    ArityMismatch,
    IllFormedEntailment,
    Scope,
    MixedInstantiate,
    DuplicateStrategy,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::DuplicateDeclaration => "duplicate declaration",
            ErrorKind::UnknownIdentifier => "unknown identifier",
            ErrorKind::ArityMismatch => "arity mismatch",
            ErrorKind::IllFormedEntailment => "ill-formed entailment",
            ErrorKind::Scope => "scope error",
            ErrorKind::MixedInstantiate => "mixed instantiate",
            ErrorKind::DuplicateStrategy => "duplicate strategy",
        })
    }
}

/// A diagnostic anchored at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ErrorKind, line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            line,
            col,
            message: message.into(),
        }
    }
}
