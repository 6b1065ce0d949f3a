use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::kr::{parse_theory, KrError, Statement, Theory};
use crate::logic::{Formula, Term};

/// Predicates an annotation may state facts about, with their arities.
pub const ANNOTATION_PREDICATES: &[(&str, usize)] = &[
    ("clause", 1),
    ("main_verb", 2),
    ("aux_verb", 2),
    ("s_adjunct", 2),
    ("verbt_word", 2),
    ("adjt_word", 2),
    ("morf", 2),
];

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error(transparent)]
    Syntax(#[from] KrError),
    #[error("line {line}: annotations may only contain ground facts, found `{stmt}`")]
    NotAFact { line: usize, stmt: String },
    #[error("line {line}: `{pred}` is not an annotation predicate")]
    UnknownPredicate { line: usize, pred: String },
}

/// Ground facts describing the tokens of one or more clauses.
#[derive(Clone, Debug)]
pub struct Annotation {
    facts: BTreeMap<String, Vec<Vec<Term>>>,
    theory: Theory,
}

impl Annotation {
    pub fn parse(src: &str) -> Result<Annotation, AnnotationError> {
        let theory = parse_theory(src)?;
        let mut facts: BTreeMap<String, Vec<Vec<Term>>> = BTreeMap::new();
        for located in theory.located_statements() {
            let line = located.line;
            let Statement::Rule(rule) = &located.stmt else {
                return Err(AnnotationError::NotAFact { line, stmt: located.stmt.to_string() });
            };
            if rule.body != Formula::True || !rule.head.is_ground() {
                return Err(AnnotationError::NotAFact { line, stmt: located.stmt.to_string() });
            }
            if !ANNOTATION_PREDICATES.iter().any(|&(p, n)| p == &*rule.head.pred && n == rule.head.arity()) {
                return Err(AnnotationError::UnknownPredicate { line, pred: rule.head.pred.to_string() });
            }
            facts.entry(rule.head.pred.to_string()).or_default().push(rule.head.args.clone());
        }
        Ok(Annotation { facts, theory })
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn facts(&self, pred: &str) -> &[Vec<Term>] {
        self.facts.get(pred).map(Vec::as_slice).unwrap_or(&[])
    }

    fn pairs(&self, pred: &str) -> impl Iterator<Item = (&Term, &Term)> {
        self.facts(pred).iter().map(|args| (&args[0], &args[1]))
    }
}

/// A violated well-formedness condition of an annotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Diagnostic {
    MainVerbCount { clause: String, found: usize },
    UndeclaredClause { clause: String },
    AuxCycle { token: String },
    AuxNotRooted { token: String },
    WordCount { token: String, found: usize },
    MorfCount { token: String, found: usize },
    UnknownLexeme { token: String, word: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::MainVerbCount { clause, found } => {
                write!(f, "clause {clause} has {found} main verbs, expected exactly one")
            }
            Diagnostic::UndeclaredClause { clause } => write!(f, "{clause} is used as a clause but not declared"),
            Diagnostic::AuxCycle { token } => write!(f, "auxiliary chain through {token} is cyclic"),
            Diagnostic::AuxNotRooted { token } => {
                write!(f, "auxiliary chain from {token} does not end in a main verb")
            }
            Diagnostic::WordCount { token, found } => {
                write!(f, "token {token} has {found} words, expected exactly one")
            }
            Diagnostic::MorfCount { token, found } => {
                write!(f, "verb token {token} has {found} morphology facts, expected exactly one")
            }
            Diagnostic::UnknownLexeme { token, word } => {
                write!(f, "token {token}: no lexicon entry for the word {word}")
            }
        }
    }
}

/// Well-formedness of `annotation` against the lexicon in `theory`. The
/// result is sorted and empty iff the annotation is well formed.
pub fn validate_annotation(annotation: &Annotation, theory: &Theory) -> Vec<Diagnostic> {
    let mut out = BTreeSet::new();
    let name = |t: &Term| t.to_string();

    let declared: BTreeSet<String> = annotation.facts("clause").iter().map(|a| name(&a[0])).collect();
    let mut clauses = declared.clone();
    let mut main_of: BTreeMap<String, usize> = BTreeMap::new();
    let mut mains = BTreeSet::new();
    for (s, w) in annotation.pairs("main_verb") {
        clauses.insert(name(s));
        *main_of.entry(name(s)).or_default() += 1;
        mains.insert(name(w));
    }
    for (s, _) in annotation.pairs("s_adjunct") {
        clauses.insert(name(s));
    }
    for c in &clauses {
        if !declared.contains(c) {
            out.insert(Diagnostic::UndeclaredClause { clause: c.clone() });
        }
        let found = main_of.get(c).copied().unwrap_or(0);
        if found != 1 {
            out.insert(Diagnostic::MainVerbCount { clause: c.clone(), found });
        }
    }

    let mut verb_tokens: BTreeSet<String> = mains.clone();
    let mut complement: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (a, c) in annotation.pairs("aux_verb") {
        verb_tokens.insert(name(a));
        verb_tokens.insert(name(c));
        complement.entry(name(a)).or_default().push(name(c));
    }
    for (t, _) in annotation.pairs("verbt_word").chain(annotation.pairs("morf")) {
        verb_tokens.insert(name(t));
    }

    for start in complement.keys() {
        let mut seen = BTreeSet::new();
        let mut current = start.clone();
        loop {
            if !seen.insert(current.clone()) {
                out.insert(Diagnostic::AuxCycle { token: start.clone() });
                break;
            }
            match complement.get(&current) {
                Some(next) => current = next[0].clone(),
                None => {
                    if !mains.contains(&current) {
                        out.insert(Diagnostic::AuxNotRooted { token: start.clone() });
                    }
                    break;
                }
            }
        }
    }

    let lexemes: BTreeSet<String> = theory
        .definition("verb_lex")
        .map(|d| d.rules.iter().filter_map(|r| r.head.args.get(1)).map(name).collect())
        .unwrap_or_default();
    let count = |pred: &str, token: &str| annotation.pairs(pred).filter(|(t, _)| name(t) == token).count();
    for t in &verb_tokens {
        let words = count("verbt_word", t);
        if words != 1 {
            out.insert(Diagnostic::WordCount { token: t.clone(), found: words });
        }
        let morfs = count("morf", t);
        if morfs != 1 {
            out.insert(Diagnostic::MorfCount { token: t.clone(), found: morfs });
        }
    }
    for (t, w) in annotation.pairs("verbt_word") {
        if !lexemes.contains(&name(w)) {
            out.insert(Diagnostic::UnknownLexeme { token: name(t), word: name(w) });
        }
    }

    let mut adjuncts: BTreeSet<String> = annotation.pairs("s_adjunct").map(|(_, a)| name(a)).collect();
    adjuncts.extend(annotation.pairs("adjt_word").map(|(a, _)| name(a)));
    for a in &adjuncts {
        let words = count("adjt_word", a);
        if words != 1 {
            out.insert(Diagnostic::WordCount { token: a.clone(), found: words });
        }
    }
    out.into_iter().collect()
}
