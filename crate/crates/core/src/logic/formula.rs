use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::term::{sym, Sym, Term};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: sym(pred), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| f(a)).collect() }
    }

    /// The atom viewed as a term, which lets unification treat tuples uniformly.
    pub fn as_term(&self) -> Term {
        Term::App(self.pred.clone(), Arc::from(self.args.clone()))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<Sym>, Box<Formula>),
    Forall(Vec<Sym>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(pred, args))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn exists(vars: Vec<Sym>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn forall(vars: Vec<Sym>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    /// Conjunction with `true` units dropped and singletons unwrapped.
    pub fn and(items: Vec<Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().filter(|f| *f != Formula::True).collect();
        if items.iter().any(|f| *f == Formula::False) {
            return Formula::False;
        }
        match items.len() {
            0 => Formula::True,
            1 => items.pop().unwrap(),
            _ => Formula::And(items),
        }
    }

    /// Disjunction with `false` units dropped and singletons unwrapped.
    pub fn or(items: Vec<Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().filter(|f| *f != Formula::False).collect();
        if items.iter().any(|f| *f == Formula::True) {
            return Formula::True;
        }
        match items.len() {
            0 => Formula::False,
            1 => items.pop().unwrap(),
            _ => Formula::Or(items),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Sym>, out: &mut BTreeSet<Sym>) {
        let term = |t: &Term, bound: &Vec<Sym>, out: &mut BTreeSet<Sym>| {
            for v in t.vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => a.args.iter().for_each(|t| term(t, bound, out)),
            Formula::Eq(s, t) => {
                term(s, bound, out);
                term(t, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                f.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.visit_atoms_and_terms(&mut |t| t.collect_vars(&mut out));
        self.visit(&mut |f| {
            if let Formula::Exists(vs, _) | Formula::Forall(vs, _) = f {
                out.extend(vs.iter().cloned());
            }
        });
        out
    }

    /// Pre-order traversal over subformulas.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Calls `f` on every top-level term argument of atoms and equalities.
    pub fn visit_atoms_and_terms(&self, f: &mut impl FnMut(&Term)) {
        self.visit(&mut |g| match g {
            Formula::Atom(a) => a.args.iter().for_each(&mut *f),
            Formula::Eq(s, t) => {
                f(s);
                f(t);
            }
            _ => {}
        });
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Atom>) {
            match f {
                Formula::Atom(a) => out.push(a),
                Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => go(g, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| go(g, out)),
                Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    /// Renames bound variables to `V0, V1, ...` in order of binding, so that
    /// alpha-equivalent formulas become syntactically equal.
    pub fn alpha_normalize(&self) -> Formula {
        fn term(t: &Term, env: &HashMap<Sym, Sym>) -> Term {
            t.map_vars(&mut |v| Term::Var(env.get(v).cloned().unwrap_or_else(|| v.clone())))
        }
        fn go(f: &Formula, env: &mut HashMap<Sym, Sym>, next: &mut usize) -> Formula {
            match f {
                Formula::True | Formula::False => f.clone(),
                Formula::Atom(a) => Formula::Atom(a.map_terms(&mut |t| term(t, env))),
                Formula::Eq(s, t) => Formula::Eq(term(s, env), term(t, env)),
                Formula::Not(g) => Formula::not(go(g, env, next)),
                Formula::And(gs) => Formula::And(gs.iter().map(|g| go(g, env, next)).collect()),
                Formula::Or(gs) => Formula::Or(gs.iter().map(|g| go(g, env, next)).collect()),
                Formula::Implies(a, b) => Formula::implies(go(a, env, next), go(b, env, next)),
                Formula::Equiv(a, b) => Formula::equiv(go(a, env, next), go(b, env, next)),
                Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
                    let saved: Vec<(Sym, Option<Sym>)> =
                        vs.iter().map(|v| (v.clone(), env.get(v).cloned())).collect();
                    let mut renamed = Vec::with_capacity(vs.len());
                    for v in vs {
                        let fresh: Sym = Arc::from(format!("V{next}"));
                        *next += 1;
                        env.insert(v.clone(), fresh.clone());
                        renamed.push(fresh);
                    }
                    let body = go(g, env, next);
                    for (v, old) in saved {
                        match old {
                            Some(o) => env.insert(v, o),
                            None => env.remove(&v),
                        };
                    }
                    if matches!(f, Formula::Exists(..)) {
                        Formula::Exists(renamed, Box::new(body))
                    } else {
                        Formula::Forall(renamed, Box::new(body))
                    }
                }
            }
        }
        go(self, &mut HashMap::new(), &mut 0)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::Implies(..) | Formula::Equiv(..) => 1,
            Formula::Or(gs) if gs.len() > 1 => 2,
            Formula::And(gs) if gs.len() > 1 => 3,
            Formula::Or(_) | Formula::And(_) => 5,
            Formula::Not(_) => 4,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        let list = |f: &mut fmt::Formatter<'_>, vs: &[Sym]| -> fmt::Result {
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Eq(s, t) => write!(f, "{s} = {t}"),
            Formula::Not(g) => {
                write!(f, "not ")?;
                g.fmt_at(f, 4)
            }
            Formula::And(gs) | Formula::Or(gs) if gs.is_empty() => {
                write!(f, "{}", if matches!(self, Formula::And(_)) { "true" } else { "false" })
            }
            Formula::And(gs) | Formula::Or(gs) if gs.len() == 1 => gs[0].fmt_at(f, min_prec),
            Formula::And(gs) => {
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    g.fmt_at(f, 4)?;
                }
                Ok(())
            }
            Formula::Or(gs) => {
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ; ")?;
                    }
                    g.fmt_at(f, 3)?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " => ")?;
                b.fmt_at(f, 2)
            }
            Formula::Equiv(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " <=> ")?;
                b.fmt_at(f, 2)
            }
            Formula::Exists(vs, g) => {
                write!(f, "exists(")?;
                list(f, vs)?;
                write!(f, ")$ ")?;
                g.fmt_at(f, 0)
            }
            Formula::Forall(vs, g) => {
                write!(f, "forall(")?;
                list(f, vs)?;
                write!(f, ")$ ")?;
                g.fmt_at(f, 0)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A definitional rule `head <- body`. Variables that only occur in the body
/// are implicitly existentially quantified there.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Formula,
}

impl Rule {
    pub fn fact(head: Atom) -> Rule {
        Rule { head, body: Formula::True }
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        let mut out = self.body.all_vars();
        self.head.collect_vars(&mut out);
        out
    }

    /// Head variables first, then body-only variables.
    pub fn local_vars(&self) -> Vec<Sym> {
        let mut head = BTreeSet::new();
        self.head.collect_vars(&mut head);
        self.body.free_vars().into_iter().filter(|v| !head.contains(v)).collect()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- {}", self.head, self.body)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str, args: &[&str]) -> Formula {
        Formula::atom(
            name,
            args.iter()
                .map(|a| if a.starts_with(char::is_uppercase) { Term::var(a) } else { Term::constant(a) })
                .collect(),
        )
    }

    #[test]
    fn prints_with_minimal_parentheses() {
        let f = Formula::Or(vec![
            Formula::And(vec![p("a", &[]), Formula::not(p("b", &["X"]))]),
            p("c", &[]),
        ]);
        assert_eq!(f.to_string(), "a & not b(X) ; c");
        let g = Formula::And(vec![Formula::Or(vec![p("a", &[]), p("b", &[])]), p("c", &[])]);
        assert_eq!(g.to_string(), "(a ; b) & c");
        let q = Formula::And(vec![p("a", &[]), Formula::Exists(vec![sym("X")], Box::new(p("b", &["X"])))]);
        assert_eq!(q.to_string(), "a & (exists(X)$ b(X))");
    }

    #[test]
    fn free_vars_skip_bound() {
        let f = Formula::Exists(vec![sym("X")], Box::new(p("r", &["X", "Y"])));
        let fv: Vec<_> = f.free_vars().into_iter().map(|s| s.to_string()).collect();
        assert_eq!(fv, vec!["Y"]);
    }

    #[test]
    fn alpha_normalization_identifies_renamings() {
        let a = Formula::Forall(vec![sym("X")], Box::new(p("q", &["X", "Z"])));
        let b = Formula::Forall(vec![sym("Y")], Box::new(p("q", &["Y", "Z"])));
        assert_ne!(a, b);
        assert_eq!(a.alpha_normalize(), b.alpha_normalize());
    }
}
