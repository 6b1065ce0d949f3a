//! Terms, formulas, substitutions and normal forms.

pub mod formula;
pub mod nnf;
pub mod subst;
pub mod term;

pub use formula::{Atom, Formula, Rule};
pub use nnf::{is_nnf, to_nnf};
pub use subst::{apply_to_formula, apply_to_term, rename_apart, unify, Substitution};
pub use term::{sym, FreshNames, Sym, Term};
