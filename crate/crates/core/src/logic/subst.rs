use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::formula::{Atom, Formula, Rule};
use super::term::{FreshNames, Sym, Term};

/// A finite map from variables to terms.
///
/// Bindings are stored triangularly (a bound term may mention other bound
/// variables) and the occurs-check is always on, so [`Substitution::resolve`]
/// terminates and fully applying the substitution is idempotent.
/// Cloning is O(1) thanks to the persistent map underneath.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: im::HashMap<Sym, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn is_bound(&self, var: &str) -> bool {
        self.map.contains_key(var)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Sym> {
        self.map.keys()
    }

    /// Binds without any checks. Callers are responsible for the occurs-check.
    pub fn bind(&mut self, var: Sym, term: Term) {
        self.map.insert(var, term);
    }

    /// Follows variable bindings at the top level only.
    pub fn walk(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Term::Var(v) = &cur {
            match self.map.get(v) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    /// Fully applies the substitution.
    pub fn resolve(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match self.walk(t) {
            Term::Var(v) => Term::Var(v),
            Term::App(f, args) if args.is_empty() => Term::App(f, args),
            Term::App(f, args) => Term::App(f, args.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    pub fn resolve_atom(&self, a: &Atom) -> Atom {
        a.map_terms(&mut |t| self.resolve(t))
    }

    fn occurs(&self, var: &str, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(v) => &*v == var,
            Term::App(_, args) => args.iter().any(|a| self.occurs(var, a)),
        }
    }

    /// Extends the substitution to a most general unifier of `a` and `b`.
    /// Newly bound variables are appended to `bound`. On failure the
    /// substitution may hold partial bindings and should be discarded.
    ///
    /// When two unbound variables meet, the one for which `prefer` answers
    /// true is the one that gets bound.
    pub fn unify_with(
        &mut self,
        a: &Term,
        b: &Term,
        prefer: &impl Fn(&Sym) -> bool,
        bound: &mut Vec<Sym>,
    ) -> bool {
        let a = self.walk(a);
        let b = self.walk(b);
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), Term::Var(y)) => {
                if prefer(y) && !prefer(x) {
                    self.map.insert(y.clone(), a.clone());
                    bound.push(y.clone());
                } else {
                    self.map.insert(x.clone(), b.clone());
                    bound.push(x.clone());
                }
                true
            }
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if self.occurs(x, t) {
                    return false;
                }
                self.map.insert(x.clone(), t.clone());
                bound.push(x.clone());
                true
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return false;
                }
                xs.iter().zip(ys.iter()).all(|(x, y)| self.unify_with(x, y, prefer, bound))
            }
        }
    }

    pub fn unify_in_place(&mut self, a: &Term, b: &Term) -> bool {
        self.unify_with(a, b, &|_| false, &mut Vec::new())
    }

    pub fn unify_atoms_in_place(&mut self, a: &Atom, b: &Atom) -> bool {
        a.pred == b.pred && a.args.len() == b.args.len() && self.unify_in_place(&a.as_term(), &b.as_term())
    }

    /// Capture-avoiding application to a formula: bound occurrences are left
    /// alone, and a quantified variable that would capture a variable of an
    /// incoming term is renamed.
    pub fn apply_formula(&self, f: &Formula) -> Formula {
        if self.map.is_empty() {
            return f.clone();
        }
        let flat: HashMap<Sym, Term> = f
            .free_vars()
            .into_iter()
            .filter(|v| self.map.contains_key(v))
            .map(|v| {
                let t = self.resolve(&Term::Var(v.clone()));
                (v, t)
            })
            .collect();
        apply_flat(f, &flat)
    }
}

/// Single-pass replacement; `map` must already be fully resolved.
fn apply_flat(f: &Formula, map: &HashMap<Sym, Term>) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    let term = |t: &Term| t.map_vars(&mut |v| map.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone())));
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => Formula::Atom(a.map_terms(&mut |t| term(t))),
        Formula::Eq(s, t) => Formula::Eq(term(s), term(t)),
        Formula::Not(g) => Formula::not(apply_flat(g, map)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| apply_flat(g, map)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| apply_flat(g, map)).collect()),
        Formula::Implies(a, b) => Formula::implies(apply_flat(a, map), apply_flat(b, map)),
        Formula::Equiv(a, b) => Formula::equiv(apply_flat(a, map), apply_flat(b, map)),
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let mut inner = map.clone();
            for v in vs {
                inner.remove(v);
            }
            let free = g.free_vars();
            inner.retain(|v, _| free.contains(v));
            // Variables that substituted terms would drag into the scope.
            let mut incoming = BTreeSet::new();
            for t in inner.values() {
                t.collect_vars(&mut incoming);
            }
            let mut avoid = f.all_vars();
            avoid.extend(incoming.iter().cloned());
            let mut renamed = Vec::with_capacity(vs.len());
            for v in vs {
                if incoming.contains(v) {
                    let fresh = fresh_variant(v, &avoid);
                    avoid.insert(fresh.clone());
                    inner.insert(v.clone(), Term::Var(fresh.clone()));
                    renamed.push(fresh);
                } else {
                    renamed.push(v.clone());
                }
            }
            let body = Box::new(apply_flat(g, &inner));
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(renamed, body)
            } else {
                Formula::Forall(renamed, body)
            }
        }
    }
}

fn fresh_variant(v: &Sym, avoid: &BTreeSet<Sym>) -> Sym {
    (1..)
        .map(|k| Arc::<str>::from(format!("{v}_{k}")))
        .find(|cand| !avoid.contains(cand))
        .expect("unbounded counter")
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut entries: Vec<_> = self.map.iter().collect();
        entries.sort();
        write!(f, "{{")?;
        for (i, (v, t)) in entries.into_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}->{t}")?;
        }
        write!(f, "}}")
    }
}

/// Most general unifier of `t1` and `t2` extending `s`, or `None`.
///
/// Distinct functors or arities never unify, which builds the unique names
/// assumption into the procedure.
pub fn unify(t1: &Term, t2: &Term, s: &Substitution) -> Option<Substitution> {
    let mut out = s.clone();
    out.unify_in_place(t1, t2).then_some(out)
}

pub fn apply_to_term(s: &Substitution, t: &Term) -> Term {
    s.resolve(t)
}

pub fn apply_to_formula(s: &Substitution, f: &Formula) -> Formula {
    s.apply_formula(f)
}

/// Renames every variable of the rule, bound ones included, to globally fresh names.
pub fn rename_apart(rule: &Rule, fresh: &mut FreshNames) -> Rule {
    let mut map = HashMap::new();
    for v in rule.vars() {
        map.insert(v, fresh.fresh());
    }
    Rule { head: rename_atom(&rule.head, &map), body: rename_formula(&rule.body, &map) }
}

pub fn rename_atom(a: &Atom, map: &HashMap<Sym, Sym>) -> Atom {
    a.map_terms(&mut |t| rename_term(t, map))
}

fn rename_term(t: &Term, map: &HashMap<Sym, Sym>) -> Term {
    t.map_vars(&mut |v| Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())))
}

/// Renames every occurrence (free or bound) of the mapped variables.
pub fn rename_formula(f: &Formula, map: &HashMap<Sym, Sym>) -> Formula {
    let var = |v: &Sym| map.get(v).cloned().unwrap_or_else(|| v.clone());
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => Formula::Atom(rename_atom(a, map)),
        Formula::Eq(s, t) => Formula::Eq(rename_term(s, map), rename_term(t, map)),
        Formula::Not(g) => Formula::not(rename_formula(g, map)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename_formula(g, map)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename_formula(g, map)).collect()),
        Formula::Implies(a, b) => Formula::implies(rename_formula(a, map), rename_formula(b, map)),
        Formula::Equiv(a, b) => Formula::equiv(rename_formula(a, map), rename_formula(b, map)),
        Formula::Exists(vs, g) => {
            Formula::Exists(vs.iter().map(var).collect(), Box::new(rename_formula(g, map)))
        }
        Formula::Forall(vs, g) => {
            Formula::Forall(vs.iter().map(var).collect(), Box::new(rename_formula(g, map)))
        }
    }
}
