use thiserror::Error;

use crate::logic::Sym;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KrError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("line {line}: {kind} `{symbol}` used with arity {found}, but elsewhere with arity {expected}")]
    Arity { line: usize, kind: &'static str, symbol: Sym, expected: usize, found: usize },

    #[error("line {line}: open function `{name}` is declared more than once")]
    OpenFunctionRedeclared { line: usize, name: Sym },

    #[error("predicate `{0}` is both defined by rules and declared as an open function")]
    DefinedAndOpen(Sym),

    #[error("line {line}: `{symbol}` is a built-in and cannot be {what}")]
    Builtin { line: usize, symbol: Sym, what: &'static str },
}

impl KrError {
    pub fn syntax(line: usize, col: usize, msg: impl Into<String>) -> KrError {
        KrError::Syntax { line, col, msg: msg.into() }
    }
}
