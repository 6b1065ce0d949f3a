use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::completion::expand_open_function;
use super::error::KrError;
use super::parser::{parse_statements, Located};
use crate::logic::{sym, Atom, Formula, Rule, Sym, Term};

/// Interval relations and properties handled by the constraint store.
pub const BUILTINS: &[(&str, usize)] = &[
    ("int", 1),
    ("point", 1),
    ("hour", 1),
    ("day_a", 1),
    ("overlap", 2),
    ("within", 2),
    ("before", 2),
    ("meets", 2),
];

pub fn builtin_arity(pred: &str) -> Option<usize> {
    BUILTINS.iter().find(|(p, _)| *p == pred).map(|&(_, n)| n)
}

pub fn is_builtin(pred: &str) -> bool {
    builtin_arity(pred).is_some()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Fol(Formula),
    Rule(Rule),
    OpenFunction(OpenFunctionDecl),
    Query(Formula),
}

/// `of f:: d1(_), ..., dn(_) -> r(_).` declares an (n+1)-ary open predicate
/// that behaves as a total function from the domain types into the range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenFunctionDecl {
    pub name: Sym,
    pub domain: Vec<Sym>,
    pub range: Sym,
}

impl OpenFunctionDecl {
    pub fn arity(&self) -> usize {
        self.domain.len() + 1
    }
}

impl fmt::Display for OpenFunctionDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "of {}:: ", self.name)?;
        for (i, d) in self.domain.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}(_)")?;
        }
        write!(f, " -> {}(_)", self.range)
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Fol(g) => write!(f, "fol {g}."),
            Statement::Rule(r) => write!(f, "{r}."),
            Statement::OpenFunction(d) => write!(f, "{d}."),
            Statement::Query(q) => write!(f, "?- {q}."),
        }
    }
}

/// The rules of one defined predicate, in textual order.
#[derive(Clone, Debug, PartialEq)]
pub struct Definition {
    pub pred: Sym,
    pub arity: usize,
    pub rules: Vec<Rule>,
}

/// A parsed and classified theory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Theory {
    statements: Vec<Located>,
    /// Predicates defined without any rule (their extension is empty).
    empty_definitions: BTreeMap<Sym, usize>,
    definitions: BTreeMap<Sym, Definition>,
    open_predicates: BTreeSet<Sym>,
    pred_arity: BTreeMap<Sym, usize>,
    functor_arity: BTreeMap<Sym, usize>,
}

pub fn parse_theory(src: &str) -> Result<Theory, KrError> {
    Theory::from_statements(parse_statements(src)?)
}

impl Theory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_statements(statements: Vec<Located>) -> Result<Theory, KrError> {
        let mut t = Theory { statements, ..Theory::default() };
        t.classify()?;
        Ok(t)
    }

    /// Appends the statements of `other` and reclassifies.
    pub fn merge(&mut self, other: &Theory) -> Result<(), KrError> {
        self.statements.extend(other.statements.iter().cloned());
        for (p, n) in &other.empty_definitions {
            self.empty_definitions.insert(p.clone(), *n);
        }
        self.classify()
    }

    /// Marks `pred` as defined even if no rule mentions it, so that a
    /// missing enumeration means "empty" instead of "abducible".
    pub fn ensure_defined(&mut self, pred: &str, arity: usize) -> Result<(), KrError> {
        self.empty_definitions.insert(sym(pred), arity);
        self.classify()
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.statements.iter().map(|l| &l.stmt)
    }

    pub fn located_statements(&self) -> &[Located] {
        &self.statements
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Formula> {
        self.statements().filter_map(|s| match s {
            Statement::Fol(f) => Some(f),
            _ => None,
        })
    }

    pub fn open_functions(&self) -> impl Iterator<Item = &OpenFunctionDecl> {
        self.statements().filter_map(|s| match s {
            Statement::OpenFunction(d) => Some(d),
            _ => None,
        })
    }

    pub fn queries(&self) -> impl Iterator<Item = &Formula> {
        self.statements().filter_map(|s| match s {
            Statement::Query(q) => Some(q),
            _ => None,
        })
    }

    /// All axioms with open function declarations expanded in place,
    /// in textual order.
    pub fn constraints(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        for s in self.statements() {
            match s {
                Statement::Fol(f) => out.push(f.clone()),
                Statement::OpenFunction(d) => out.extend(expand_open_function(d)),
                _ => {}
            }
        }
        out
    }

    pub fn definitions(&self) -> &BTreeMap<Sym, Definition> {
        &self.definitions
    }

    pub fn definition(&self, pred: &str) -> Option<&Definition> {
        self.definitions.get(pred)
    }

    pub fn open_predicates(&self) -> &BTreeSet<Sym> {
        &self.open_predicates
    }

    pub fn is_defined(&self, pred: &str) -> bool {
        self.definitions.contains_key(pred)
    }

    pub fn is_open(&self, pred: &str) -> bool {
        self.open_predicates.contains(pred)
    }

    pub fn predicate_arity(&self, pred: &str) -> Option<usize> {
        self.pred_arity.get(pred).copied().or_else(|| builtin_arity(pred))
    }

    pub fn functor_arity(&self, f: &str) -> Option<usize> {
        self.functor_arity.get(f).copied()
    }

    /// Checks that a formula from outside the theory (a query) uses
    /// predicates and functors consistently with it.
    pub fn check_formula(&self, f: &Formula) -> Result<(), KrError> {
        let mut probe = self.clone();
        probe.note_formula(f, 0)?;
        Ok(())
    }

    fn classify(&mut self) -> Result<(), KrError> {
        self.definitions.clear();
        self.open_predicates.clear();
        self.pred_arity.clear();
        self.functor_arity.clear();

        let statements = std::mem::take(&mut self.statements);
        let result = self.classify_statements(&statements);
        self.statements = statements;
        result
    }

    fn classify_statements(&mut self, statements: &[Located]) -> Result<(), KrError> {
        let mut used: BTreeSet<Sym> = BTreeSet::new();
        let mut functions: BTreeMap<Sym, usize> = BTreeMap::new();
        for (p, &n) in &self.empty_definitions.clone() {
            self.note_pred(p, n, 0)?;
            self.definitions
                .entry(p.clone())
                .or_insert_with(|| Definition { pred: p.clone(), arity: n, rules: Vec::new() });
        }
        for Located { line, stmt } in statements {
            let line = *line;
            match stmt {
                Statement::Fol(f) | Statement::Query(f) => {
                    self.note_formula(f, line)?;
                    used.extend(f.atoms().into_iter().map(|a| a.pred.clone()));
                }
                Statement::Rule(r) => {
                    if is_builtin(&r.head.pred) {
                        return Err(KrError::Builtin { line, symbol: r.head.pred.clone(), what: "defined" });
                    }
                    self.note_atom(&r.head, line)?;
                    self.note_formula(&r.body, line)?;
                    used.extend(r.body.atoms().into_iter().map(|a| a.pred.clone()));
                    self.definitions
                        .entry(r.head.pred.clone())
                        .or_insert_with(|| Definition {
                            pred: r.head.pred.clone(),
                            arity: r.head.arity(),
                            rules: Vec::new(),
                        })
                        .rules
                        .push(r.clone());
                }
                Statement::OpenFunction(d) => {
                    if is_builtin(&d.name) {
                        return Err(KrError::Builtin { line, symbol: d.name.clone(), what: "an open function" });
                    }
                    if functions.insert(d.name.clone(), line).is_some() {
                        return Err(KrError::OpenFunctionRedeclared { line, name: d.name.clone() });
                    }
                    self.note_pred(&d.name, d.arity(), line)?;
                    for p in d.domain.iter().chain(std::iter::once(&d.range)) {
                        self.note_pred(p, 1, line)?;
                        used.insert(p.clone());
                    }
                    used.insert(d.name.clone());
                }
            }
        }
        for name in functions.keys() {
            if self.definitions.contains_key(name) {
                return Err(KrError::DefinedAndOpen(name.clone()));
            }
        }
        self.open_predicates = used
            .into_iter()
            .filter(|p| !is_builtin(p) && !self.definitions.contains_key(p))
            .collect();
        Ok(())
    }

    fn note_pred(&mut self, pred: &Sym, n: usize, line: usize) -> Result<(), KrError> {
        let expected = builtin_arity(pred).or_else(|| self.pred_arity.get(pred).copied());
        match expected {
            Some(e) if e != n => Err(KrError::Arity {
                line,
                kind: "predicate",
                symbol: pred.clone(),
                expected: e,
                found: n,
            }),
            Some(_) => Ok(()),
            None => {
                self.pred_arity.insert(pred.clone(), n);
                Ok(())
            }
        }
    }

    fn note_atom(&mut self, a: &Atom, line: usize) -> Result<(), KrError> {
        self.note_pred(&a.pred, a.arity(), line)?;
        a.args.iter().try_for_each(|t| self.note_term(t, line))
    }

    fn note_term(&mut self, t: &Term, line: usize) -> Result<(), KrError> {
        if let Term::App(f, args) = t {
            match self.functor_arity.get(f) {
                Some(&e) if e != args.len() => {
                    return Err(KrError::Arity {
                        line,
                        kind: "functor",
                        symbol: f.clone(),
                        expected: e,
                        found: args.len(),
                    })
                }
                Some(_) => {}
                None => {
                    self.functor_arity.insert(f.clone(), args.len());
                }
            }
            args.iter().try_for_each(|a| self.note_term(a, line))?;
        }
        Ok(())
    }

    fn note_formula(&mut self, f: &Formula, line: usize) -> Result<(), KrError> {
        let mut result = Ok(());
        f.visit(&mut |g| {
            if result.is_err() {
                return;
            }
            result = match g {
                Formula::Atom(a) => self.note_atom(a, line),
                Formula::Eq(s, t) => self.note_term(s, line).and_then(|_| self.note_term(t, line)),
                _ => Ok(()),
            };
        });
        result
    }
}

/// Prints the statements in source syntax, one per line. Predicates made
/// defined through [`Theory::ensure_defined`] have no textual form.
impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.statements() {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNCLE: &str = "
        uncle(S,C) <- male(S) & sibling(S,P) & parent(P,C).
        uncle(S,C) <- male(S) & married(S,A) & sibling(A,P) & parent(P,C).
    ";

    fn names(set: &BTreeSet<Sym>) -> Vec<&str> {
        set.iter().map(|s| &**s).collect()
    }

    #[test]
    fn classifies_uncle() {
        let t = parse_theory(UNCLE).unwrap();
        assert_eq!(t.definitions().keys().map(|k| &**k).collect::<Vec<_>>(), vec!["uncle"]);
        assert_eq!(names(t.open_predicates()), vec!["male", "married", "parent", "sibling"]);
        assert_eq!(t.definition("uncle").unwrap().rules.len(), 2);
    }

    #[test]
    fn empty_theory() {
        let t = parse_theory("").unwrap();
        assert!(t.definitions().is_empty());
        assert!(t.open_predicates().is_empty());
    }

    #[test]
    fn open_functions_are_open_and_builtins_excluded() {
        let t = parse_theory("of s_ppp:: clause(Z) -> point(_). clause(s1).").unwrap();
        assert_eq!(names(t.open_predicates()), vec!["s_ppp"]);
        assert_eq!(t.constraints().len(), 3);
    }

    #[test]
    fn arity_errors_name_the_symbol() {
        let err = parse_theory("p(a).\nfol p(a,b).").unwrap_err();
        assert_eq!(
            err,
            KrError::Arity { line: 2, kind: "predicate", symbol: sym("p"), expected: 1, found: 2 }
        );
        let err = parse_theory("p(f(a)). q(f(a,b)).").unwrap_err();
        assert!(matches!(err, KrError::Arity { kind: "functor", .. }));
        // Predicates and functors live in separate namespaces.
        assert!(parse_theory("utt(U) <- evttime(utt,U). int(a).").is_err());
        assert!(parse_theory("utt(U) <- evttime(utt,U). q(int(a,b)).").is_ok());
    }

    #[test]
    fn open_function_conflicts() {
        let err = parse_theory("of f:: a(_) -> b(_).\nof f:: a(_) -> b(_).").unwrap_err();
        assert_eq!(err, KrError::OpenFunctionRedeclared { line: 2, name: sym("f") });
        let err = parse_theory("of f:: a(_) -> b(_). f(x,y).").unwrap_err();
        assert_eq!(err, KrError::DefinedAndOpen(sym("f")));
    }

    #[test]
    fn ensure_defined_closes_a_predicate() {
        let mut t = parse_theory("fol forall(X)$ s_adjunct(s1,X) => p(X).").unwrap();
        assert!(t.is_open("s_adjunct"));
        t.ensure_defined("s_adjunct", 2).unwrap();
        assert!(t.is_defined("s_adjunct"));
        assert!(!t.is_open("s_adjunct"));
        assert!(t.ensure_defined("s_adjunct", 3).is_err());
    }

    #[test]
    fn printing_round_trips() {
        let src = "of pres:: country(_), year(_) -> person(_).\n\
                   fol forall(C,Y,P1,P2)$ pres(C,Y,P1) & pres(C,Y,P2) => P1 = P2.\n\
                   clause(s1) <- true.\n\
                   ?- exists(U)$ utt(U) & not (a ; b).\n";
        let t = parse_theory(src).unwrap();
        let printed = t.to_string();
        let again = parse_theory(&printed).unwrap();
        assert_eq!(t.statements().collect::<Vec<_>>(), again.statements().collect::<Vec<_>>());
    }
}
