//! The abductive search.
//!
//! A search state holds a stack of goals. Formula goals are made true;
//! clause goals `forall U: l1 ; ... ; ln` are integrity constraints. A
//! clause with a negative open literal is parked as a *trigger* on that
//! literal's predicate and is resolved against every abduced atom of the
//! predicate, past and future. Negative defined literals are unfolded
//! through the completion, and positive disjunctions become choice points.
//! Temporal builtins go to the constraint store. States are persistent, so
//! a choice point simply clones the state once per alternative.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use super::answer::Answer;
use super::static_eval::StaticEval;
use super::{SolveConfig, SolveError};
use crate::kr::{builtin_arity, Theory};
use crate::logic::subst::rename_formula;
use crate::logic::{rename_apart, to_nnf, Atom, Formula, FreshNames, Substitution, Sym, Term};
use crate::temporal::{Property, Pt, Relation, Span, Store, TimePoint};

#[derive(Clone, Debug)]
pub(crate) struct Clause {
    pub univ: Vec<Sym>,
    pub lits: Vec<Formula>,
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let body = Formula::Or(self.lits.clone());
        if self.univ.is_empty() {
            write!(f, "{body}")
        } else {
            write!(f, "{}", Formula::Forall(self.univ.clone(), Box::new(body)))
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Trigger {
    clause: Arc<Clause>,
    lit: usize,
}

impl Trigger {
    fn pattern(&self) -> &Atom {
        match &self.clause.lits[self.lit] {
            Formula::Not(g) => match &**g {
                Formula::Atom(a) => a,
                _ => unreachable!("trigger literal is a negated atom"),
            },
            _ => unreachable!("trigger literal is a negated atom"),
        }
    }
}

#[derive(Clone, Debug)]
enum Goal {
    Prove(Formula),
    Clause(Arc<Clause>),
    Resolve(Trigger, Atom),
}

#[derive(Clone, Debug)]
struct Suspension {
    goal: Goal,
    on: Vec<Sym>,
}

#[derive(Clone)]
pub(crate) struct State {
    goals: im::Vector<Goal>,
    subst: Substitution,
    positives: im::Vector<Atom>,
    triggers: im::HashMap<Sym, im::Vector<Trigger>>,
    suspended: im::Vector<Suspension>,
    store: Arc<Store>,
    points: im::HashMap<Sym, usize>,
    point_order: im::Vector<Sym>,
    deferred: im::Vector<Formula>,
    fresh: FreshNames,
    woken_at: usize,
    labelling: Option<Arc<Vec<i64>>>,
}

pub(crate) enum Step {
    Continue,
    Fail,
    Branch(Vec<State>),
    Done(Box<Answer>),
}

type R<T> = Result<T, SolveError>;

pub(crate) struct Engine<'t> {
    theory: &'t Theory,
    config: SolveConfig,
    open: BTreeSet<Sym>,
    statics: HashSet<Sym>,
    recursive: HashSet<Sym>,
    query_vars: Vec<Sym>,
}

impl<'t> Engine<'t> {
    pub fn new(theory: &'t Theory, query: &Formula, config: SolveConfig) -> (Engine<'t>, State) {
        let mut open = theory.open_predicates().clone();
        for a in query.atoms() {
            if !theory.is_defined(&a.pred) && builtin_arity(&a.pred).is_none() {
                open.insert(a.pred.clone());
            }
        }
        let (statics, recursive) = analyse_definitions(theory, &open);
        let query_vars: Vec<Sym> = query.free_vars().into_iter().collect();

        let mut goals = im::Vector::new();
        goals.push_back(Goal::Prove(to_nnf(query)));
        for c in theory.constraints() {
            let free: Vec<Sym> = c.free_vars().into_iter().collect();
            goals.push_back(Goal::Prove(to_nnf(&Formula::forall(free, c))));
        }
        let state = State {
            goals,
            subst: Substitution::new(),
            positives: im::Vector::new(),
            triggers: im::HashMap::new(),
            suspended: im::Vector::new(),
            store: Arc::new(Store::new()),
            points: im::HashMap::new(),
            point_order: im::Vector::new(),
            deferred: im::Vector::new(),
            fresh: FreshNames::new(),
            woken_at: 0,
            labelling: None,
        };
        (Engine { theory, config, open, statics, recursive, query_vars }, state)
    }

    pub fn budget(&self) -> u64 {
        self.config.budget
    }

    fn static_eval(&self) -> StaticEval<'_> {
        StaticEval { theory: self.theory, statics: &self.statics }
    }

    fn is_open(&self, p: &str) -> bool {
        self.open.contains(p)
    }

    fn is_defined(&self, p: &str) -> bool {
        self.theory.is_defined(p)
    }

    fn is_static(&self, p: &str) -> bool {
        self.statics.contains(p)
    }

    /// One reduction step.
    pub fn step(&self, st: &mut State) -> R<Step> {
        self.wake(st);
        match st.goals.pop_front() {
            None => self.finish(st),
            Some(Goal::Prove(f)) => self.prove(st, f),
            Some(Goal::Clause(c)) => self.clause(st, &c),
            Some(Goal::Resolve(t, a)) => self.resolve(st, t, a),
        }
    }

    fn wake(&self, st: &mut State) {
        if st.subst.len() == st.woken_at {
            return;
        }
        st.woken_at = st.subst.len();
        let mut keep = im::Vector::new();
        let mut woken = Vec::new();
        for s in st.suspended.iter() {
            let bound = s.on.iter().any(|v| st.subst.walk(&Term::Var(v.clone())) != Term::Var(v.clone()));
            if bound {
                woken.push(s.goal.clone());
            } else {
                keep.push_back(s.clone());
            }
        }
        st.suspended = keep;
        for g in woken.into_iter().rev() {
            st.goals.push_front(g);
        }
    }

    fn push_front_all(st: &mut State, goals: Vec<Goal>) {
        for g in goals.into_iter().rev() {
            st.goals.push_front(g);
        }
    }

    // ----- formulas -------------------------------------------------------

    fn prove(&self, st: &mut State, f: Formula) -> R<Step> {
        match f {
            Formula::True => Ok(Step::Continue),
            Formula::False => Ok(Step::Fail),
            Formula::And(items) => {
                Self::push_front_all(st, items.into_iter().map(Goal::Prove).collect());
                Ok(Step::Continue)
            }
            Formula::Or(lits) => {
                st.goals.push_front(Goal::Clause(Arc::new(Clause { univ: vec![], lits })));
                Ok(Step::Continue)
            }
            Formula::Exists(vs, g) => {
                let (_, body) = rename_bound(&vs, &g, &mut st.fresh);
                st.goals.push_front(Goal::Prove(body));
                Ok(Step::Continue)
            }
            Formula::Forall(vs, g) => {
                let (univ, body) = rename_bound(&vs, &g, &mut st.fresh);
                st.goals.push_front(Goal::Clause(Arc::new(Clause { univ, lits: vec![body] })));
                Ok(Step::Continue)
            }
            Formula::Eq(a, b) => Ok(if self.unify(st, &a, &b)? { Step::Continue } else { Step::Fail }),
            Formula::Not(inner) => match *inner {
                Formula::Atom(a) if builtin_arity(&a.pred).is_some() => {
                    let a = st.subst.resolve_atom(&a);
                    self.negated_builtin(st, &a)
                }
                g @ (Formula::Atom(_) | Formula::Eq(..)) => {
                    let lits = vec![Formula::not(g)];
                    st.goals.push_front(Goal::Clause(Arc::new(Clause { univ: vec![], lits })));
                    Ok(Step::Continue)
                }
                other => self.prove(st, to_nnf(&Formula::not(other))),
            },
            Formula::Atom(a) => {
                let a = st.subst.resolve_atom(&a);
                if builtin_arity(&a.pred).is_some() {
                    self.builtin(st, &a)
                } else if self.is_defined(&a.pred) {
                    self.unfold_positive(st, &a)
                } else {
                    self.abduce(st, a)
                }
            }
            f @ (Formula::Implies(..) | Formula::Equiv(..)) => self.prove(st, to_nnf(&f)),
        }
    }

    fn unfold_positive(&self, st: &mut State, a: &Atom) -> R<Step> {
        if self.is_static(&a.pred) {
            let answers = self.static_eval().answers(a, &st.subst, &mut st.fresh);
            if let Some(answers) = answers {
                let mut branches = Vec::new();
                for s in answers {
                    let mut next = st.clone();
                    let inst = s.resolve_atom(a);
                    if self.unify(&mut next, &a.as_term(), &inst.as_term())? {
                        branches.push(next);
                    }
                }
                return Ok(Self::branch(branches));
            }
        }
        let def = self.theory.definition(&a.pred).expect("defined predicate");
        let mut branches = Vec::new();
        for rule in &def.rules {
            let mut next = st.clone();
            let r = rename_apart(rule, &mut next.fresh);
            if self.unify(&mut next, &r.head.as_term(), &a.as_term())? {
                next.goals.push_front(Goal::Prove(to_nnf(&r.body)));
                branches.push(next);
            }
        }
        Ok(Self::branch(branches))
    }

    fn branch(mut branches: Vec<State>) -> Step {
        match branches.len() {
            0 => Step::Fail,
            1 => Step::Branch(vec![branches.pop().unwrap()]),
            _ => Step::Branch(branches),
        }
    }

    /// Makes an open atom true: reuse a unifiable abduced atom (one choice
    /// per candidate) or abduce it as a new atom distinct from all of them.
    fn abduce(&self, st: &mut State, a: Atom) -> R<Step> {
        let mut candidates = Vec::new();
        for p in st.positives.iter() {
            let p = st.subst.resolve_atom(p);
            if p.pred != a.pred {
                continue;
            }
            if p == a {
                return Ok(Step::Continue);
            }
            let mut probe = st.subst.clone();
            if probe.unify_atoms_in_place(&p, &a) {
                candidates.push(p);
            }
        }
        let mut branches = Vec::new();
        for c in &candidates {
            let mut next = st.clone();
            if self.unify(&mut next, &a.as_term(), &c.as_term())? {
                branches.push(next);
            }
        }
        let mut fresh = st.clone();
        let mut goals = Vec::new();
        for c in &candidates {
            let lits = vec![Formula::not(Formula::Eq(a.as_term(), c.as_term()))];
            goals.push(Goal::Clause(Arc::new(Clause { univ: vec![], lits })));
        }
        if let Some(ts) = fresh.triggers.get(&a.pred) {
            goals.extend(ts.iter().map(|t| Goal::Resolve(t.clone(), a.clone())));
        }
        fresh.positives.push_back(a);
        Self::push_front_all(&mut fresh, goals);
        branches.push(fresh);
        Ok(Self::branch(branches))
    }

    // ----- clauses --------------------------------------------------------

    fn clause(&self, st: &mut State, c: &Clause) -> R<Step> {
        let mut univ: Vec<Sym> = c.univ.clone();
        let mut lits: Vec<Formula> = Vec::new();
        let mut pending: Vec<Formula> = c.lits.iter().rev().cloned().collect();
        while let Some(l) = pending.pop() {
            match st.subst.apply_formula(&l) {
                Formula::Or(items) => pending.extend(items.into_iter().rev()),
                Formula::Forall(vs, g) => {
                    let (names, body) = rename_bound(&vs, &g, &mut st.fresh);
                    univ.extend(names);
                    pending.push(body);
                }
                Formula::False => {}
                Formula::True => return Ok(Step::Continue),
                f @ (Formula::Implies(..) | Formula::Equiv(..)) => pending.push(to_nnf(&f)),
                Formula::Not(g) if !matches!(*g, Formula::Atom(_) | Formula::Eq(..)) => {
                    pending.push(to_nnf(&Formula::Not(g)))
                }
                other => lits.push(other),
            }
        }

        // A conjunction over universal variables cannot be chosen as a whole:
        // split the clause into one clause per conjunct.
        let split = lits.iter().position(|l| {
            matches!(l, Formula::And(_)) && l.free_vars().iter().any(|v| univ.contains(v))
        });
        if let Some(i) = split {
            let Formula::And(items) = &lits[i] else { unreachable!() };
            let goals = items
                .iter()
                .map(|item| {
                    let mut ls = lits.clone();
                    ls[i] = item.clone();
                    Goal::Clause(Arc::new(Clause { univ: univ.clone(), lits: ls }))
                })
                .collect();
            Self::push_front_all(st, goals);
            return Ok(Step::Continue);
        }

        'simplify: loop {
            if lits.is_empty() {
                return Ok(Step::Fail);
            }
            let mut free = BTreeSet::new();
            for l in &lits {
                free.extend(l.free_vars());
            }
            univ.retain(|v| free.contains(v));
            let snapshot = univ.clone();
            let is_univ = |v: &Sym| snapshot.contains(v);

            // Negative equalities that are already decided, or that only
            // constrain universal variables.
            for i in 0..lits.len() {
                let Formula::Not(g) = &lits[i] else { continue };
                let Formula::Eq(s, t) = &**g else { continue };
                let mut local = Substitution::new();
                let mut bound = Vec::new();
                if !local.unify_with(s, t, &is_univ, &mut bound) {
                    return Ok(Step::Continue);
                }
                if bound.is_empty() {
                    lits.remove(i);
                    continue 'simplify;
                }
                if bound.iter().all(is_univ) {
                    lits.remove(i);
                    lits = lits.iter().map(|l| local.apply_formula(l)).collect();
                    univ.retain(|v| !bound.contains(v));
                    continue 'simplify;
                }
            }

            let neg_atom = |l: &Formula| -> Option<Atom> {
                match l {
                    Formula::Not(g) => match &**g {
                        Formula::Atom(a) if builtin_arity(&a.pred).is_none() => Some(a.clone()),
                        _ => None,
                    },
                    _ => None,
                }
            };
            let pick = |want: &dyn Fn(&Atom) -> bool| -> Option<usize> {
                lits.iter().position(|l| neg_atom(l).is_some_and(|a| want(&a)))
            };

            let static_lit = pick(&|a| self.is_static(&a.pred) && !self.recursive.contains(&a.pred))
                .or_else(|| pick(&|a| self.is_static(&a.pred)));
            if let Some(i) = static_lit {
                return self.unfold_negative(st, univ, lits, i);
            }
            if let Some(i) = pick(&|a| self.is_open(&a.pred)) {
                return Ok(self.add_trigger(st, Clause { univ, lits }, i));
            }
            let defined = pick(&|a| self.is_defined(&a.pred) && !self.recursive.contains(&a.pred))
                .or_else(|| pick(&|a| self.is_defined(&a.pred)));
            if let Some(i) = defined {
                return self.unfold_negative(st, univ, lits, i);
            }

            // A negative equality that needs existential bindings waits for them.
            let waiting = lits.iter().find_map(|l| {
                let Formula::Not(g) = l else { return None };
                let Formula::Eq(s, t) = &**g else { return None };
                let mut local = Substitution::new();
                let mut bound = Vec::new();
                local.unify_with(s, t, &is_univ, &mut bound);
                Some(bound.into_iter().filter(|v| !is_univ(v)).collect::<Vec<Sym>>())
            });
            if let Some(on) = waiting {
                let goal = Goal::Clause(Arc::new(Clause { univ, lits }));
                st.suspended.push_back(Suspension { goal, on });
                return Ok(Step::Continue);
            }

            // Only positive items remain. Settle the ones whose truth is known.
            let mut changed = false;
            let mut i = 0;
            while i < lits.len() {
                match self.decide(st, &lits[i])? {
                    Some(true) => return Ok(Step::Continue),
                    Some(false) => {
                        lits.remove(i);
                        changed = true;
                    }
                    None => i += 1,
                }
            }
            if changed {
                continue 'simplify;
            }
            if !univ.is_empty() {
                return Err(SolveError::Floundering(Clause { univ, lits }.to_string()));
            }
            if lits.len() == 1 {
                st.goals.push_front(Goal::Prove(lits.pop().unwrap()));
                return Ok(Step::Continue);
            }
            let (mut first, rest): (Vec<Formula>, Vec<Formula>) =
                lits.into_iter().partition(|l| self.non_abducing(l));
            first.extend(rest);
            let branches = first
                .into_iter()
                .map(|l| {
                    let mut next = st.clone();
                    next.goals.push_front(Goal::Prove(l));
                    next
                })
                .collect();
            return Ok(Step::Branch(branches));
        }
    }

    /// Items that can be made true without abducing anything.
    fn non_abducing(&self, l: &Formula) -> bool {
        match l {
            Formula::Eq(..) => true,
            Formula::Atom(a) => builtin_arity(&a.pred).is_some() || self.is_static(&a.pred),
            Formula::Not(g) => matches!(&**g, Formula::Atom(a) if builtin_arity(&a.pred).is_some()),
            _ => false,
        }
    }

    /// Truth of a positive clause item when it is already determined.
    fn decide(&self, st: &mut State, l: &Formula) -> R<Option<bool>> {
        Ok(match l {
            Formula::Eq(s, t) => {
                let mut probe = st.subst.clone();
                if !probe.unify_in_place(s, t) {
                    Some(false)
                } else if st.subst.resolve(s) == st.subst.resolve(t) {
                    Some(true)
                } else {
                    None
                }
            }
            Formula::Atom(a) if builtin_arity(&a.pred).is_some() => eval_builtin(a)?,
            Formula::Not(g) => match &**g {
                Formula::Atom(a) if builtin_arity(&a.pred).is_some() => eval_builtin(a)?.map(|b| !b),
                _ => None,
            },
            Formula::Atom(a) if self.is_static(&a.pred) => self.static_eval().holds(a, &mut st.fresh),
            Formula::Atom(a) if self.is_open(&a.pred) && a.is_ground() => {
                let present = st.positives.iter().any(|p| st.subst.resolve_atom(p) == *a);
                present.then_some(true)
            }
            _ => None,
        })
    }

    /// Replaces `not p(t)` by the completion of `p`: one clause per rule,
    /// with the rule's variables universally quantified.
    fn unfold_negative(&self, st: &mut State, univ: Vec<Sym>, lits: Vec<Formula>, i: usize) -> R<Step> {
        let Formula::Not(g) = &lits[i] else { unreachable!() };
        let Formula::Atom(a) = &**g else { unreachable!() };
        let def = self.theory.definition(&a.pred).expect("defined predicate");
        let mut goals = Vec::new();
        for rule in &def.rules {
            let r = rename_apart(rule, &mut st.fresh);
            let mut new_lits = lits[..i].to_vec();
            for (x, h) in a.args.iter().zip(&r.head.args) {
                new_lits.push(Formula::not(Formula::Eq(x.clone(), h.clone())));
            }
            new_lits.push(to_nnf(&Formula::not(r.body.clone())));
            new_lits.extend_from_slice(&lits[i + 1..]);
            let mut new_univ = univ.clone();
            let mut rv = BTreeSet::new();
            r.head.collect_vars(&mut rv);
            rv.extend(r.body.free_vars());
            new_univ.extend(rv);
            goals.push(Goal::Clause(Arc::new(Clause { univ: new_univ, lits: new_lits })));
        }
        Self::push_front_all(st, goals);
        Ok(Step::Continue)
    }

    fn add_trigger(&self, st: &mut State, c: Clause, i: usize) -> Step {
        let trigger = Trigger { clause: Arc::new(c), lit: i };
        let pred = trigger.pattern().pred.clone();
        let goals: Vec<Goal> = st
            .positives
            .iter()
            .filter(|p| p.pred == pred)
            .map(|p| Goal::Resolve(trigger.clone(), p.clone()))
            .collect();
        st.triggers.entry(pred).or_default().push_back(trigger);
        Self::push_front_all(st, goals);
        Step::Continue
    }

    fn resolve(&self, st: &mut State, t: Trigger, atom: Atom) -> R<Step> {
        let pattern = st.subst.resolve_atom(t.pattern());
        let target = st.subst.resolve_atom(&atom);
        let univ = &t.clause.univ;
        let is_univ = |v: &Sym| univ.contains(v);
        let mut local = Substitution::new();
        let mut bound = Vec::new();
        if pattern.args.len() != target.args.len()
            || !local.unify_with(&pattern.as_term(), &target.as_term(), &is_univ, &mut bound)
        {
            return Ok(Step::Continue);
        }
        let on: Vec<Sym> = bound.iter().filter(|v| !is_univ(v)).cloned().collect();
        if !on.is_empty() {
            st.suspended.push_back(Suspension { goal: Goal::Resolve(t, atom), on });
            return Ok(Step::Continue);
        }
        let lits: Vec<Formula> = t
            .clause
            .lits
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != t.lit)
            .map(|(_, l)| local.apply_formula(&st.subst.apply_formula(l)))
            .collect();
        let univ: Vec<Sym> = univ.iter().filter(|v| !bound.contains(v)).cloned().collect();
        st.goals.push_front(Goal::Clause(Arc::new(Clause { univ, lits })));
        Ok(Step::Continue)
    }

    // ----- equality and time points --------------------------------------

    /// Global unification, keeping the time-point registry and the store in
    /// step with the new bindings.
    fn unify(&self, st: &mut State, a: &Term, b: &Term) -> R<bool> {
        let mut bound = Vec::new();
        if !st.subst.unify_with(a, b, &|_| false, &mut bound) {
            return Ok(false);
        }
        for v in bound {
            let Some(&node) = st.points.get(&v) else { continue };
            match st.subst.resolve(&Term::Var(v.clone())) {
                Term::Var(w) => match st.points.get(&w) {
                    Some(&other) => {
                        if Arc::make_mut(&mut st.store).eq(Pt::var(node), Pt::var(other)).is_err() {
                            return Ok(false);
                        }
                    }
                    None => {
                        st.points.insert(w, node);
                    }
                },
                t => match TimePoint::from_term(&t)? {
                    Some(p) if t.is_ground() => {
                        if Arc::make_mut(&mut st.store).fix(node, p.to_hours()).is_err() {
                            return Ok(false);
                        }
                    }
                    _ => return Ok(false),
                },
            }
        }
        Ok(true)
    }

    fn point_of(&self, st: &mut State, t: &Term) -> R<Option<Pt>> {
        match st.subst.walk(t) {
            Term::Var(v) => {
                if let Some(&n) = st.points.get(&v) {
                    return Ok(Some(Pt::var(n)));
                }
                let n = Arc::make_mut(&mut st.store).new_var();
                st.points.insert(v.clone(), n);
                st.point_order.push_back(v);
                Ok(Some(Pt::var(n)))
            }
            t => {
                let t = st.subst.resolve(&t);
                match TimePoint::from_term(&t)? {
                    Some(p) => Ok(Some(Pt::fixed(p.to_hours()))),
                    None => Ok(None),
                }
            }
        }
    }

    /// Endpoints of an interval term, turning an unbound variable into
    /// `int(S,E)` over fresh points. `None` if the term cannot be an interval.
    fn span_of(&self, st: &mut State, t: &Term) -> R<Option<Span>> {
        let t = st.subst.walk(t);
        let (s, e) = match &t {
            Term::Var(v) => {
                if st.points.contains_key(v) {
                    return Ok(None);
                }
                let (s, e) = (Term::Var(st.fresh.fresh()), Term::Var(st.fresh.fresh()));
                st.subst.bind(v.clone(), Term::app("int", vec![s.clone(), e.clone()]));
                (s, e)
            }
            Term::App(f, args) if &**f == "int" && args.len() == 2 => (args[0].clone(), args[1].clone()),
            _ => return Ok(None),
        };
        let (Some(start), Some(end)) = (self.point_of(st, &s)?, self.point_of(st, &e)?) else {
            return Ok(None);
        };
        let span = Span { start, end };
        if Arc::make_mut(&mut st.store).nonempty(span).is_err() {
            return Ok(None);
        }
        Ok(Some(span))
    }

    fn spans(&self, st: &mut State, a: &Atom) -> R<Option<Vec<Span>>> {
        let mut out = Vec::with_capacity(a.args.len());
        for t in &a.args {
            match self.span_of(st, t)? {
                Some(s) => out.push(s),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    fn builtin(&self, st: &mut State, a: &Atom) -> R<Step> {
        let Some(spans) = self.spans(st, a)? else { return Ok(Step::Fail) };
        let store = Arc::make_mut(&mut st.store);
        let ok = if let Some(p) = Property::from_name(&a.pred) {
            store.post_property(p, spans[0]).is_ok()
        } else {
            let rel = Relation::from_name(&a.pred).expect("builtin relation");
            store.post(rel, spans[0], spans[1]).is_ok()
        };
        Ok(if ok { Step::Continue } else { Step::Fail })
    }

    fn negated_builtin(&self, st: &mut State, a: &Atom) -> R<Step> {
        if let Some(b) = eval_builtin(a)? {
            return Ok(if b { Step::Fail } else { Step::Continue });
        }
        if let Some(p) = Property::from_name(&a.pred) {
            if matches!(p, Property::Point | Property::Hour) && !a.args[0].is_var() {
                let Some(s) = self.span_of(st, &a.args[0])? else { return Ok(Step::Continue) };
                let ok = Arc::make_mut(&mut st.store).le(s.start, s.end, -2).is_ok();
                return Ok(if ok { Step::Continue } else { Step::Fail });
            }
            st.deferred.push_back(Formula::not(Formula::Atom(a.clone())));
            return Ok(Step::Continue);
        }
        let rel = Relation::from_name(&a.pred).expect("builtin relation");
        let Some(spans) = self.spans(st, a)? else { return Ok(Step::Continue) };
        let (x, y) = (spans[0], spans[1]);
        type Post = Box<dyn Fn(&mut Store) -> bool>;
        let alternatives: Vec<Post> = match rel {
            Relation::Before => vec![Box::new(move |s: &mut Store| s.post_not_before(x, y).is_ok())],
            Relation::Within => vec![
                Box::new(move |s: &mut Store| s.lt(x.start, y.start).is_ok()),
                Box::new(move |s: &mut Store| s.lt(y.end, x.end).is_ok()),
            ],
            Relation::Overlap => vec![
                Box::new(move |s: &mut Store| s.le(x.end, y.start, 0).is_ok()),
                Box::new(move |s: &mut Store| s.le(y.end, x.start, 0).is_ok()),
            ],
            Relation::Meets => vec![
                Box::new(move |s: &mut Store| s.lt(x.end, y.start).is_ok()),
                Box::new(move |s: &mut Store| s.lt(y.start, x.end).is_ok()),
            ],
        };
        let mut branches = Vec::new();
        for post in alternatives {
            let mut next = st.clone();
            if post(Arc::make_mut(&mut next.store)) {
                branches.push(next);
            }
        }
        Ok(Self::branch(branches))
    }

    // ----- labelling and answers ------------------------------------------

    fn finish(&self, st: &mut State) -> R<Step> {
        for s in st.suspended.iter() {
            for v in &s.on {
                if let Term::Var(w) = st.subst.walk(&Term::Var(v.clone())) {
                    if !st.points.contains_key(&w) {
                        return Err(SolveError::Floundering(describe(&s.goal)));
                    }
                }
            }
        }
        let unlabelled: Vec<(Sym, usize)> = st
            .point_order
            .iter()
            .filter_map(|v| match st.subst.walk(&Term::Var(v.clone())) {
                Term::Var(w) => Some((w.clone(), st.points[&w])),
                _ => None,
            })
            .collect();
        if !unlabelled.is_empty() || st.labelling.is_none() {
            let anchor = self.config.anchor.to_hours();
            let store = Arc::make_mut(&mut st.store);
            let Ok(values) = store.label(anchor) else { return Ok(Step::Fail) };
            for (node, &v) in values.iter().enumerate().skip(1) {
                store.fix(node, v).expect("labelling satisfies the store");
            }
            let mut seen = HashSet::new();
            for (w, node) in unlabelled {
                if seen.insert(w.clone()) {
                    st.subst.bind(w, TimePoint::from_hours(values[node])?.to_term());
                }
            }
            st.labelling = Some(Arc::new(values));
            return Ok(Step::Continue);
        }
        for d in st.deferred.iter() {
            let d = st.subst.apply_formula(d);
            let Formula::Not(g) = &d else { unreachable!() };
            let Formula::Atom(a) = &**g else { unreachable!() };
            if eval_builtin(a)?.unwrap_or(false) {
                return Ok(Step::Fail);
            }
        }
        Ok(Step::Done(Box::new(self.answer(st)?)))
    }

    fn answer(&self, st: &mut State) -> R<Answer> {
        // Whatever is still unbound is unconstrained: name it.
        let mut unbound = BTreeSet::new();
        let mut order = Vec::new();
        for p in st.positives.iter() {
            for t in &st.subst.resolve_atom(p).args {
                let mut vs = BTreeSet::new();
                t.collect_vars(&mut vs);
                for v in vs {
                    if unbound.insert(v.clone()) {
                        order.push(v);
                    }
                }
            }
        }
        for v in &self.query_vars {
            if let Term::Var(w) = st.subst.walk(&Term::Var(v.clone())) {
                if unbound.insert(w.clone()) {
                    order.push(w);
                }
            }
        }
        for (k, v) in order.into_iter().enumerate() {
            st.subst.bind(v, Term::constant(&format!("sk{k}")));
        }

        let mut extensions = std::collections::BTreeMap::new();
        for p in &self.open {
            extensions.insert(p.clone(), Vec::new());
        }
        for p in st.positives.iter() {
            let a = st.subst.resolve_atom(p);
            let list = extensions.entry(a.pred.clone()).or_insert_with(Vec::new);
            if !list.contains(&a) {
                list.push(a);
            }
        }
        let mut labels = std::collections::BTreeMap::new();
        for v in st.point_order.iter() {
            if let Some(p) = TimePoint::from_term(&st.subst.resolve(&Term::Var(v.clone())))? {
                labels.insert(v.clone(), p);
            }
        }
        let bindings = self.query_vars.iter().map(|v| (v.clone(), st.subst.resolve(&Term::Var(v.clone())))).collect();
        let values = st.labelling.clone().unwrap_or_default();
        let replay = st.store.satisfied_by(&values);
        Ok(Answer::new(extensions, bindings, labels, replay))
    }
}

fn describe(g: &Goal) -> String {
    match g {
        Goal::Prove(f) => f.to_string(),
        Goal::Clause(c) => c.to_string(),
        Goal::Resolve(t, a) => format!("{} against {a}", t.clause),
    }
}

fn rename_bound(vs: &[Sym], body: &Formula, fresh: &mut FreshNames) -> (Vec<Sym>, Formula) {
    let map: HashMap<Sym, Sym> = vs.iter().map(|v| (v.clone(), fresh.fresh())).collect();
    let names = vs.iter().map(|v| map[v].clone()).collect();
    (names, rename_formula(body, &map))
}

/// Ground truth of a builtin atom, `None` while an argument is non-ground.
pub(crate) fn eval_builtin(a: &Atom) -> R<Option<bool>> {
    if !a.is_ground() {
        return Ok(None);
    }
    let mut spans = Vec::with_capacity(a.args.len());
    for t in &a.args {
        match interval_of(t)? {
            Some(i) => spans.push(i),
            None => return Ok(Some(false)),
        }
    }
    Ok(Some(if let Some(p) = Property::from_name(&a.pred) {
        crate::temporal::interval::has_property_hours(p, spans[0])
    } else {
        let rel = Relation::from_name(&a.pred).expect("builtin relation");
        crate::temporal::interval::holds_hours(rel, spans[0], spans[1])
    }))
}

/// Hour endpoints of a ground `int(ts(..),ts(..))` term; an empty interval
/// is not an interval.
pub(crate) fn interval_of(t: &Term) -> R<Option<(i64, i64)>> {
    let Some((f, 2)) = t.functor() else { return Ok(None) };
    if &**f != "int" {
        return Ok(None);
    }
    let (Some(s), Some(e)) = (TimePoint::from_term(&t.args()[0])?, TimePoint::from_term(&t.args()[1])?) else {
        return Ok(None);
    };
    let (s, e) = (s.to_hours(), e.to_hours());
    Ok((s < e).then_some((s, e)))
}

/// Static predicates reach no open predicate through their definitions;
/// recursive ones reach themselves.
fn analyse_definitions(theory: &Theory, open: &BTreeSet<Sym>) -> (HashSet<Sym>, HashSet<Sym>) {
    let deps: HashMap<Sym, BTreeSet<Sym>> = theory
        .definitions()
        .iter()
        .map(|(p, d)| {
            let mut out = BTreeSet::new();
            for r in &d.rules {
                for a in r.body.atoms() {
                    out.insert(a.pred.clone());
                }
            }
            (p.clone(), out)
        })
        .collect();
    let mut statics = HashSet::new();
    let mut recursive = HashSet::new();
    for p in deps.keys() {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<Sym> = deps[p].iter().cloned().collect();
        while let Some(q) = stack.pop() {
            if seen.insert(q.clone()) {
                if let Some(ds) = deps.get(&q) {
                    stack.extend(ds.iter().cloned());
                }
            }
        }
        if seen.contains(p) {
            recursive.insert(p.clone());
        }
        if !seen.iter().any(|q| open.contains(q) || builtin_arity(q).is_some()) {
            statics.insert(p.clone());
        }
    }
    (statics, recursive)
}
