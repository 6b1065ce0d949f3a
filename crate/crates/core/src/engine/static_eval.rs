//! Top-down evaluation of predicates whose definitions never reach an open
//! predicate. Such atoms have a fixed, finite answer set that can be
//! computed without abducing anything.

use std::collections::HashSet;

use crate::kr::Theory;
use crate::logic::{rename_apart, to_nnf, Atom, Formula, FreshNames, Substitution, Sym};

const MAX_DEPTH: usize = 256;
const MAX_ANSWERS: usize = 4096;

pub(crate) struct StaticEval<'a> {
    pub theory: &'a Theory,
    pub statics: &'a HashSet<Sym>,
}

impl StaticEval<'_> {
    /// All answers to `atom` extending `s`, or `None` when evaluation would
    /// need an open predicate, a builtin, or a non-ground negation.
    pub fn answers(&self, atom: &Atom, s: &Substitution, fresh: &mut FreshNames) -> Option<Vec<Substitution>> {
        self.solve(&Formula::Atom(atom.clone()), s.clone(), fresh, 0)
    }

    /// Truth value of a ground static atom.
    pub fn holds(&self, atom: &Atom, fresh: &mut FreshNames) -> Option<bool> {
        if !atom.is_ground() || !self.statics.contains(&atom.pred) {
            return None;
        }
        self.answers(atom, &Substitution::new(), fresh).map(|v| !v.is_empty())
    }

    fn solve(&self, f: &Formula, s: Substitution, fresh: &mut FreshNames, depth: usize) -> Option<Vec<Substitution>> {
        if depth > MAX_DEPTH {
            return None;
        }
        match f {
            Formula::True => Some(vec![s]),
            Formula::False => Some(vec![]),
            Formula::Eq(a, b) => {
                let mut s2 = s;
                Some(if s2.unify_in_place(a, b) { vec![s2] } else { vec![] })
            }
            Formula::Atom(a) => {
                if !self.statics.contains(&a.pred) {
                    return None;
                }
                let def = self.theory.definition(&a.pred)?;
                let mut out = Vec::new();
                for rule in &def.rules {
                    let r = rename_apart(rule, fresh);
                    let mut s2 = s.clone();
                    if !s2.unify_atoms_in_place(&r.head, a) {
                        continue;
                    }
                    out.extend(self.solve(&to_nnf(&r.body), s2, fresh, depth + 1)?);
                    if out.len() > MAX_ANSWERS {
                        return None;
                    }
                }
                Some(out)
            }
            Formula::Not(g) => match &**g {
                Formula::Eq(a, b) => {
                    let (a, b) = (s.resolve(a), s.resolve(b));
                    let mut probe = s.clone();
                    if !probe.unify_in_place(&a, &b) {
                        Some(vec![s])
                    } else if a == b {
                        Some(vec![])
                    } else {
                        None
                    }
                }
                Formula::Atom(a) => {
                    let a = s.resolve_atom(a);
                    if !a.is_ground() {
                        return None;
                    }
                    let inner = self.solve(&Formula::Atom(a), s.clone(), fresh, depth + 1)?;
                    Some(if inner.is_empty() { vec![s] } else { vec![] })
                }
                _ => self.solve(&to_nnf(f), s, fresh, depth),
            },
            Formula::And(items) => {
                let mut current = vec![s];
                for item in items {
                    let mut next = Vec::new();
                    for s in current {
                        next.extend(self.solve(item, s, fresh, depth + 1)?);
                    }
                    if next.len() > MAX_ANSWERS {
                        return None;
                    }
                    current = next;
                }
                Some(current)
            }
            Formula::Or(items) => {
                let mut out = Vec::new();
                for item in items {
                    out.extend(self.solve(item, s.clone(), fresh, depth + 1)?);
                }
                Some(out)
            }
            Formula::Exists(vs, g) => {
                let map = vs.iter().map(|v| (v.clone(), fresh.fresh())).collect();
                let body = crate::logic::subst::rename_formula(g, &map);
                self.solve(&body, s, fresh, depth + 1)
            }
            Formula::Forall(..) => None,
            Formula::Implies(..) | Formula::Equiv(..) => self.solve(&to_nnf(f), s, fresh, depth),
        }
    }
}
