use super::formula::Formula;

/// Negation normal form: `=>` and `<=>` are eliminated and negation only
/// applies to atoms and equalities. Nested conjunctions (disjunctions) are
/// flattened into their parent.
pub fn to_nnf(f: &Formula) -> Formula {
    pos(f)
}

fn pos(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => neg(g),
        Formula::And(gs) => flat_and(gs.iter().map(pos)),
        Formula::Or(gs) => flat_or(gs.iter().map(pos)),
        Formula::Implies(a, b) => flat_or([neg(a), pos(b)]),
        Formula::Equiv(a, b) => {
            flat_and([flat_or([neg(a), pos(b)]), flat_or([pos(a), neg(b)])])
        }
        Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(pos(g))),
        Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(pos(g))),
    }
}

fn neg(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(_) | Formula::Eq(..) => Formula::not(f.clone()),
        Formula::Not(g) => pos(g),
        Formula::And(gs) => flat_or(gs.iter().map(neg)),
        Formula::Or(gs) => flat_and(gs.iter().map(neg)),
        Formula::Implies(a, b) => flat_and([pos(a), neg(b)]),
        Formula::Equiv(a, b) => {
            flat_or([flat_and([pos(a), neg(b)]), flat_and([neg(a), pos(b)])])
        }
        Formula::Exists(vs, g) => Formula::Forall(vs.clone(), Box::new(neg(g))),
        Formula::Forall(vs, g) => Formula::Exists(vs.clone(), Box::new(neg(g))),
    }
}

fn flat_and(items: impl IntoIterator<Item = Formula>) -> Formula {
    let mut out = Vec::new();
    for it in items {
        match it {
            Formula::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    Formula::And(out)
}

fn flat_or(items: impl IntoIterator<Item = Formula>) -> Formula {
    let mut out = Vec::new();
    for it in items {
        match it {
            Formula::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    Formula::Or(out)
}

/// True when `f` is in negation normal form.
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(..) => true,
        Formula::Not(g) => matches!(**g, Formula::Atom(_) | Formula::Eq(..)),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().all(is_nnf),
        Formula::Exists(_, g) | Formula::Forall(_, g) => is_nnf(g),
        Formula::Implies(..) | Formula::Equiv(..) => false,
    }
}
