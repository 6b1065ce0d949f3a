//! Oracles shared by the integration tests. Nothing here calls the engine.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use tense_abduction::dutch::{theory_for, Annotation};
use tense_abduction::engine::Answer;
use tense_abduction::kr::Theory;
use tense_abduction::logic::{Atom, Formula, Sym, Term};
use tense_abduction::temporal::Interval;

pub const S1: &str = include_str!("../../annotations/s1.kr");
pub const NA_GISTEREN: &str = include_str!("../../annotations/na_gisteren.kr");
pub const HAD_GEWERKT: &str = include_str!("../../annotations/had_gewerkt.kr");

pub fn sentence(src: &str) -> Theory {
    theory_for(&Annotation::parse(src).expect("annotation parses"), &[]).expect("theory merges")
}

fn ground(t: &Term, env: &HashMap<Sym, Term>) -> Term {
    match t {
        Term::Var(v) => env.get(v).cloned().unwrap_or_else(|| panic!("unbound variable {v}")),
        Term::App(f, args) => Term::app_sym(f.clone(), args.iter().map(|a| ground(a, env)).collect()),
    }
}

/// Truth of a formula over a finite domain of ground terms, with equality
/// read as syntactic identity.
pub fn eval(f: &Formula, env: &HashMap<Sym, Term>, truth: &dyn Fn(&Atom) -> bool, domain: &[Term]) -> bool {
    let quantify = |vs: &[Sym], body: &Formula, all: bool| -> bool {
        let mut idx = vec![0usize; vs.len()];
        if domain.is_empty() {
            return all;
        }
        loop {
            let mut env2 = env.clone();
            for (v, &i) in vs.iter().zip(&idx) {
                env2.insert(v.clone(), domain[i].clone());
            }
            if eval(body, &env2, truth, domain) != all {
                return !all;
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return all;
                }
                idx[k] += 1;
                if idx[k] < domain.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    };
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => truth(&Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| ground(t, env)).collect() }),
        Formula::Eq(s, t) => ground(s, env) == ground(t, env),
        Formula::Not(g) => !eval(g, env, truth, domain),
        Formula::And(items) => items.iter().all(|g| eval(g, env, truth, domain)),
        Formula::Or(items) => items.iter().any(|g| eval(g, env, truth, domain)),
        Formula::Implies(a, b) => !eval(a, env, truth, domain) || eval(b, env, truth, domain),
        Formula::Equiv(a, b) => eval(a, env, truth, domain) == eval(b, env, truth, domain),
        Formula::Exists(vs, g) => quantify(vs, g, false),
        Formula::Forall(vs, g) => quantify(vs, g, true),
    }
}

/// Every tuple of `arity` elements of `domain`, in lexicographic order.
pub fn tuples(domain: &[Term], arity: usize) -> Vec<Vec<Term>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                domain.iter().map(move |d| {
                    let mut t2 = t.clone();
                    t2.push(d.clone());
                    t2
                })
            })
            .collect();
    }
    out
}

/// Hour endpoints of an interval term.
pub fn hours(t: &Term) -> (i64, i64) {
    Interval::from_term(t).expect("valid interval").expect("interval term").hours()
}

/// The last argument of the unique atom of `pred` whose leading arguments
/// print as `key`.
pub fn value_of(answer: &Answer, pred: &str, key: &[&str]) -> Term {
    let hits: Vec<&Atom> = answer
        .extension(pred)
        .iter()
        .filter(|a| a.args.len() == key.len() + 1 && a.args.iter().zip(key).all(|(t, k)| t.to_string() == *k))
        .collect();
    assert_eq!(hits.len(), 1, "expected one {pred}{key:?} in\n{answer}");
    hits[0].args[key.len()].clone()
}

/// Extensions as sets of printed atoms, per predicate.
pub fn printed(answer: &Answer) -> BTreeMap<String, BTreeSet<String>> {
    answer
        .extensions()
        .iter()
        .map(|(p, atoms)| (p.to_string(), atoms.iter().map(ToString::to_string).collect()))
        .collect()
}

pub fn within(a: (i64, i64), b: (i64, i64)) -> bool {
    b.0 <= a.0 && a.1 <= b.1
}

pub fn before(a: (i64, i64), b: (i64, i64)) -> bool {
    a.1 <= b.0
}

pub fn meets(a: (i64, i64), b: (i64, i64)) -> bool {
    a.1 == b.0
}

pub fn overlap(a: (i64, i64), b: (i64, i64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

pub fn is_whole_day(a: (i64, i64)) -> bool {
    a.1 - a.0 == 24 && a.0.rem_euclid(24) == 0
}

/// The calendar day containing the start of `a`.
pub fn day_of(a: (i64, i64)) -> (i64, i64) {
    let s = a.0.div_euclid(24) * 24;
    (s, s + 24)
}
