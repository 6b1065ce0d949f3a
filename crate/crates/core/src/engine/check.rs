//! Model checking by direct evaluation.
//!
//! Open predicates are interpreted by the answer's extensions, defined
//! predicates by backward chaining over their rules, and builtins by
//! calendar arithmetic. Quantifiers range over the ground terms of the
//! answer and the theory plus every interval between two known time points.
//! Nothing here shares code with the search.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::answer::Answer;
use crate::kr::{builtin_arity, Theory};
use crate::logic::subst::rename_formula;
use crate::logic::{rename_apart, to_nnf, Atom, Formula, FreshNames, Substitution, Sym, Term};
use crate::temporal::{has_property, holds, Interval, Property, Relation, TemporalError, TimePoint};

const MAX_DEPTH: usize = 20_000;
const MAX_STEPS: u64 = 50_000_000;
const STACK_BYTES: usize = 512 << 20;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("answer atom {0} is not ground")]
    Unlabelled(String),
    #[error("model check exceeded its evaluation limit")]
    TooExpensive,
    #[error(transparent)]
    Temporal(#[from] TemporalError),
}

/// Whether `answer` satisfies every axiom and open-function constraint of
/// `theory`, and its time labelling satisfies the temporal store.
pub fn check_model(theory: &Theory, answer: &Answer) -> Result<bool, CheckError> {
    check_model_with_query(theory, answer, None)
}

/// As [`check_model`], additionally requiring the query under the answer's
/// bindings.
pub fn check_model_with_query(theory: &Theory, answer: &Answer, query: Option<&Formula>) -> Result<bool, CheckError> {
    for a in answer.atoms() {
        if !a.is_ground() {
            return Err(CheckError::Unlabelled(a.to_string()));
        }
    }
    if !answer.store_replay() {
        return Ok(false);
    }
    let mut goals: Vec<Formula> = theory
        .constraints()
        .into_iter()
        .map(|c| {
            let free: Vec<Sym> = c.free_vars().into_iter().collect();
            Formula::forall(free, c)
        })
        .collect();
    if let Some(q) = query {
        let mut s = Substitution::new();
        for (v, t) in answer.bindings() {
            s.bind(v.clone(), t.clone());
        }
        let q = s.apply_formula(q);
        goals.push(Formula::exists(q.free_vars().into_iter().collect(), q));
    }
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(scope, || {
                let checker = Checker::new(theory, answer, &goals)?;
                for g in &goals {
                    if !checker.sat(&[to_nnf(g)], &Substitution::new(), 0)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            })
            .expect("spawn model checker")
            .join()
            .expect("model checker panicked")
    })
}

struct Checker<'a> {
    theory: &'a Theory,
    facts: HashMap<Sym, Vec<Atom>>,
    universe: Vec<Term>,
    intervals: Vec<Term>,
    fresh: RefCell<FreshNames>,
    steps: Cell<u64>,
}

fn ground_subterms(t: &Term, out: &mut BTreeSet<Term>) {
    if t.is_ground() {
        out.insert(t.clone());
    }
    for a in t.args() {
        ground_subterms(a, out);
    }
}

impl<'a> Checker<'a> {
    fn new(theory: &'a Theory, answer: &Answer, goals: &[Formula]) -> Result<Checker<'a>, CheckError> {
        let mut facts: HashMap<Sym, Vec<Atom>> = HashMap::new();
        let mut terms = BTreeSet::new();
        for a in answer.atoms() {
            facts.entry(a.pred.clone()).or_default().push(a.clone());
            for t in &a.args {
                ground_subterms(t, &mut terms);
            }
        }
        for (_, t) in answer.bindings() {
            ground_subterms(t, &mut terms);
        }
        for g in goals {
            g.visit_atoms_and_terms(&mut |t| ground_subterms(t, &mut terms));
        }
        for d in theory.definitions().values() {
            for r in &d.rules {
                for t in &r.head.args {
                    ground_subterms(t, &mut terms);
                }
                r.body.visit_atoms_and_terms(&mut |t| ground_subterms(t, &mut terms));
            }
        }
        let mut points: BTreeSet<i64> = answer.labels().values().map(TimePoint::to_hours).collect();
        for t in &terms {
            if let Some(p) = TimePoint::from_term(t)? {
                points.insert(p.to_hours());
            }
        }
        let points: Vec<i64> = points.into_iter().collect();
        let mut intervals = Vec::new();
        for (i, &s) in points.iter().enumerate() {
            for &e in &points[i + 1..] {
                intervals.push(Interval::from_hours(s, e)?.to_term());
            }
        }
        let mut universe: BTreeSet<Term> = terms;
        universe.extend(intervals.iter().cloned());
        Ok(Checker {
            theory,
            facts,
            universe: universe.into_iter().collect(),
            intervals,
            fresh: RefCell::new(FreshNames::new()),
            steps: Cell::new(0),
        })
    }

    fn tick(&self) -> Result<(), CheckError> {
        let n = self.steps.get() + 1;
        self.steps.set(n);
        if n > MAX_STEPS {
            return Err(CheckError::TooExpensive);
        }
        Ok(())
    }

    fn rename(&self, vs: &[Sym], body: &Formula) -> Formula {
        let mut fresh = self.fresh.borrow_mut();
        let map: HashMap<Sym, Sym> = vs.iter().map(|v| (v.clone(), fresh.fresh())).collect();
        rename_formula(body, &map)
    }

    fn is_ground(f: &Formula, env: &Substitution) -> bool {
        f.free_vars().iter().all(|v| env.resolve(&Term::Var(v.clone())).is_ground())
    }

    /// Lower ranks are evaluated first; ranks 5 and up need enumeration.
    fn rank(&self, f: &Formula, env: &Substitution) -> u8 {
        match f {
            Formula::True | Formula::False | Formula::And(_) | Formula::Exists(..) | Formula::Eq(..) => 0,
            Formula::Implies(..) | Formula::Equiv(..) => 0,
            Formula::Not(g) => match &**g {
                Formula::Eq(s, t) => {
                    let mut probe = env.clone();
                    if !probe.unify_in_place(s, t) || Self::is_ground(f, env) {
                        0
                    } else {
                        6
                    }
                }
                Formula::Atom(_) => {
                    if Self::is_ground(f, env) {
                        1
                    } else {
                        6
                    }
                }
                _ => 0,
            },
            Formula::Forall(..) => {
                if Self::is_ground(f, env) {
                    1
                } else {
                    6
                }
            }
            Formula::Atom(a) if builtin_arity(&a.pred).is_some() => {
                if Self::is_ground(f, env) {
                    1
                } else {
                    5
                }
            }
            Formula::Atom(a) if self.theory.is_defined(&a.pred) => 3,
            Formula::Atom(_) => 2,
            Formula::Or(_) => 4,
        }
    }

    fn sat(&self, goals: &[Formula], env: &Substitution, depth: usize) -> Result<bool, CheckError> {
        self.tick()?;
        if depth > MAX_DEPTH {
            return Err(CheckError::TooExpensive);
        }
        let Some((i, _)) = goals.iter().enumerate().map(|(i, g)| (i, self.rank(g, env))).min_by_key(|&(i, r)| (r, i))
        else {
            return Ok(true);
        };
        let goal = &goals[i];
        let rest: Vec<Formula> = goals.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, g)| g.clone()).collect();
        let with = |front: Vec<Formula>| -> Vec<Formula> { front.into_iter().chain(rest.iter().cloned()).collect() };
        let depth = depth + 1;
        match self.rank(goal, env) {
            5 | 6 => return self.enumerate(goal, goals, env, depth),
            _ => {}
        }
        match goal {
            Formula::True => self.sat(&rest, env, depth),
            Formula::False => Ok(false),
            Formula::And(items) => self.sat(&with(items.clone()), env, depth),
            Formula::Exists(vs, b) => self.sat(&with(vec![self.rename(vs, b)]), env, depth),
            Formula::Implies(..) | Formula::Equiv(..) => self.sat(&with(vec![to_nnf(goal)]), env, depth),
            Formula::Eq(s, t) => {
                let mut env2 = env.clone();
                Ok(env2.unify_in_place(s, t) && self.sat(&rest, &env2, depth)?)
            }
            Formula::Or(items) => {
                for d in items {
                    if self.sat(&with(vec![d.clone()]), env, depth)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(vs, b) => {
                let counter = to_nnf(&Formula::not(self.rename(vs, b)));
                Ok(!self.sat(&[counter], env, depth)? && self.sat(&rest, env, depth)?)
            }
            Formula::Not(g) => match &**g {
                Formula::Eq(s, t) => {
                    let mut probe = env.clone();
                    Ok(!probe.unify_in_place(s, t) && self.sat(&rest, env, depth)?)
                }
                Formula::Atom(a) if builtin_arity(&a.pred).is_some() => {
                    Ok(!self.builtin(&env.resolve_atom(a))? && self.sat(&rest, env, depth)?)
                }
                Formula::Atom(_) => Ok(!self.sat(&[(**g).clone()], env, depth)? && self.sat(&rest, env, depth)?),
                _ => self.sat(&with(vec![to_nnf(goal)]), env, depth),
            },
            Formula::Atom(a) if builtin_arity(&a.pred).is_some() => {
                Ok(self.builtin(&env.resolve_atom(a))? && self.sat(&rest, env, depth)?)
            }
            Formula::Atom(a) => match self.theory.definition(&a.pred) {
                Some(def) => {
                    for rule in &def.rules {
                        let r = rename_apart(rule, &mut self.fresh.borrow_mut());
                        let mut env2 = env.clone();
                        if env2.unify_atoms_in_place(&r.head, a) && self.sat(&with(vec![to_nnf(&r.body)]), &env2, depth)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                }
                None => {
                    for fact in self.facts.get(&a.pred).map(Vec::as_slice).unwrap_or(&[]) {
                        let mut env2 = env.clone();
                        if env2.unify_atoms_in_place(fact, a) && self.sat(&rest, &env2, depth)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                }
            },
        }
    }

    /// Tries every domain value for one unbound variable of `goal`.
    fn enumerate(&self, goal: &Formula, goals: &[Formula], env: &Substitution, depth: usize) -> Result<bool, CheckError> {
        let unbound = goal.free_vars().into_iter().find_map(|v| match env.walk(&Term::Var(v)) {
            Term::Var(w) => Some(w),
            t => {
                let mut vs = BTreeSet::new();
                env.resolve(&t).collect_vars(&mut vs);
                vs.into_iter().next()
            }
        });
        let Some(v) = unbound else { unreachable!("enumerated goal has an unbound variable") };
        let atom = match goal {
            Formula::Not(g) => match &**g {
                Formula::Atom(a) => Some(a),
                _ => None,
            },
            Formula::Atom(a) => Some(a),
            _ => None,
        };
        let interval_arg = atom.is_some_and(|a| {
            builtin_arity(&a.pred).is_some() && a.args.iter().any(|t| env.walk(t) == Term::Var(v.clone()))
        });
        let domain = if interval_arg { &self.intervals } else { &self.universe };
        for value in domain {
            let mut env2 = env.clone();
            env2.bind(v.clone(), value.clone());
            if self.sat(goals, &env2, depth)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn builtin(&self, a: &Atom) -> Result<bool, CheckError> {
        let mut spans = Vec::with_capacity(a.args.len());
        for t in &a.args {
            match Interval::from_term(t) {
                Ok(Some(i)) => spans.push(i),
                Ok(None) | Err(TemporalError::EmptyInterval(_)) => return Ok(false),
                Err(e) => return Err(e.into()),
            }
        }
        Ok(match Property::from_name(&a.pred) {
            Some(p) => has_property(p, &spans[0]),
            None => holds(Relation::from_name(&a.pred).expect("builtin relation"), &spans[0], &spans[1]),
        })
    }
}
