use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::theory::{Definition, OpenFunctionDecl};
use crate::logic::subst::{rename_atom, rename_formula};
use crate::logic::{sym, Atom, Formula, Sym, Term};

/// Clark completion `forall Z: p(Z) <=> case_1 ; ... ; case_k`.
///
/// Each case moves the head arguments into equalities with the formal
/// parameters and existentially closes the remaining rule variables. A head
/// position that holds the same variable in every rule reuses that name as
/// the formal parameter, so `uncle(S,C)` rules complete over `S,C`.
pub fn completion(def: &Definition) -> Formula {
    let formals = formal_parameters(def);
    let head = Formula::Atom(Atom {
        pred: def.pred.clone(),
        args: formals.iter().map(|v| Term::Var(v.clone())).collect(),
    });
    let cases = cases(def, &formals);
    let rhs = match cases.len() {
        0 => Formula::False,
        1 => cases.into_iter().next().unwrap(),
        _ => Formula::Or(cases),
    };
    let body = if rhs == Formula::False { Formula::not(head) } else { Formula::equiv(head, rhs) };
    Formula::forall(formals, body)
}

fn formal_parameters(def: &Definition) -> Vec<Sym> {
    let mut taken: BTreeSet<Sym> = def.rules.iter().flat_map(|r| r.vars()).collect();
    let mut formals: Vec<Sym> = Vec::with_capacity(def.arity);
    for i in 0..def.arity {
        let shared = def.rules.first().and_then(|r| r.head.args[i].as_var().cloned()).filter(|v| {
            def.rules.iter().all(|r| r.head.args[i].as_var() == Some(v))
                && def.rules.iter().all(|r| r.head.args.iter().filter(|a| a.as_var() == Some(v)).count() == 1)
                && !formals.contains(v)
        });
        let name = shared.unwrap_or_else(|| {
            let base = if def.arity == 1 { "Z".to_string() } else { format!("Z{}", i + 1) };
            let mut cand: Sym = Arc::from(base.as_str());
            let mut k = 1;
            while taken.contains(&cand) || formals.contains(&cand) {
                cand = Arc::from(format!("{base}_{k}"));
                k += 1;
            }
            taken.insert(cand.clone());
            cand
        });
        formals.push(name);
    }
    formals
}

fn cases(def: &Definition, formals: &[Sym]) -> Vec<Formula> {
    let formal_set: BTreeSet<&Sym> = formals.iter().collect();
    let mut out = Vec::with_capacity(def.rules.len());
    for rule in &def.rules {
        let vars = rule.vars();
        let mut avoid: BTreeSet<Sym> = vars.iter().cloned().collect();
        avoid.extend(formals.iter().cloned());
        let mut map: HashMap<Sym, Sym> = HashMap::new();
        for (i, a) in rule.head.args.iter().enumerate() {
            if let Some(v) = a.as_var() {
                if &formals[i] == v {
                    map.insert(v.clone(), v.clone());
                }
            }
        }
        for v in &vars {
            if !map.contains_key(v) && formal_set.contains(v) {
                let mut k = 1;
                let mut cand: Sym = Arc::from(format!("{v}_{k}"));
                while avoid.contains(&cand) {
                    k += 1;
                    cand = Arc::from(format!("{v}_{k}"));
                }
                avoid.insert(cand.clone());
                map.insert(v.clone(), cand);
            }
        }
        let head = rename_atom(&rule.head, &map);
        let body = rename_formula(&rule.body, &map);
        let mut items = Vec::new();
        for (i, a) in head.args.iter().enumerate() {
            if a.as_var() != Some(&formals[i]) {
                items.push(Formula::Eq(Term::Var(formals[i].clone()), a.clone()));
            }
        }
        match body {
            Formula::And(inner) if !items.is_empty() => items.extend(inner),
            other => items.push(other),
        }
        let case = Formula::and(items);
        let locals: Vec<Sym> =
            case.free_vars().into_iter().filter(|v| !formal_set.contains(v)).collect();
        out.push(Formula::exists(locals, case));
    }
    out
}

/// The totality, uniqueness and typing axioms of an open function.
pub fn expand_open_function(d: &OpenFunctionDecl) -> Vec<Formula> {
    let xs: Vec<Sym> = (1..=d.domain.len()).map(|i| sym(&format!("X{i}"))).collect();
    let (p, p1, p2) = (sym("P"), sym("P1"), sym("P2"));
    let x_terms: Vec<Term> = xs.iter().map(|v| Term::Var(v.clone())).collect();
    let call = |result: &Sym| {
        let mut args = x_terms.clone();
        args.push(Term::Var(result.clone()));
        Formula::Atom(Atom { pred: d.name.clone(), args })
    };
    let typing = Formula::and(
        d.domain
            .iter()
            .zip(&x_terms)
            .map(|(dp, x)| Formula::Atom(Atom { pred: dp.clone(), args: vec![x.clone()] }))
            .collect(),
    );
    let range = Formula::Atom(Atom { pred: d.range.clone(), args: vec![Term::Var(p.clone())] });

    let totality = Formula::forall(
        xs.clone(),
        Formula::implies(
            typing.clone(),
            Formula::Exists(vec![p.clone()], Box::new(Formula::And(vec![range, call(&p)]))),
        ),
    );
    let mut all = xs.clone();
    all.extend([p1.clone(), p2.clone()]);
    let uniqueness = Formula::forall(
        all,
        Formula::implies(
            Formula::And(vec![call(&p1), call(&p2)]),
            Formula::Eq(Term::Var(p1.clone()), Term::Var(p2.clone())),
        ),
    );
    let mut all = xs;
    all.push(p.clone());
    let type_axiom = Formula::forall(all, Formula::implies(call(&p), typing));
    vec![totality, uniqueness, type_axiom]
}
