//! The theory language: `fol` axioms, `<-` definitions and `of` open
//! function declarations, plus completion and open-function expansion.

pub mod completion;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod theory;

pub use completion::{completion, expand_open_function};
pub use error::KrError;
pub use parser::{parse_formula, parse_statements, parse_term, Located};
pub use theory::{
    builtin_arity, is_builtin, parse_theory, Definition, OpenFunctionDecl, Statement, Theory, BUILTINS,
};
