use thiserror::Error;

use crate::types::Type;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type mismatch in `{term}`: expected {expected}, found {found}")]
    TypeMismatch { term: String, expected: Type, found: Type },
    #[error("`{0}` is applied but is not a function")]
    NotAFunction(String),
    #[error("arity undefined for type {0} of order > 1")]
    ArityUndefined(Type),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Signature,
    Type,
}

/// Parse failure with a 1-based source location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind_name} error: {message}", kind_name = self.kind_name())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, message: impl Into<String>, line: usize, column: usize) -> Self {
        ParseError {
            kind,
            message: message.into(),
            line,
            column,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::Signature => "signature",
            ParseErrorKind::Type => "type",
        }
    }
}
