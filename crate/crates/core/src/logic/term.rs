use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Interned-ish symbol. Cheap to clone and safe to share between threads.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// A first-order term.
///
/// Constants are 0-ary applications and integer literals are constants whose
/// name is the decimal rendering of the number, so there is a single code path
/// for everything that is not a variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Sym),
    App(Sym, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(sym(name), Arc::from(Vec::new()))
    }

    pub fn int(value: i64) -> Term {
        Term::constant(&value.to_string())
    }

    pub fn app(functor: &str, args: Vec<Term>) -> Term {
        Term::App(sym(functor), Arc::from(args))
    }

    pub fn app_sym(functor: Sym, args: Vec<Term>) -> Term {
        Term::App(functor, Arc::from(args))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Sym> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn functor(&self) -> Option<(&Sym, usize)> {
        match self {
            Term::Var(_) => None,
            Term::App(f, args) => Some((f, args.len())),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// Integer value of a numeric constant.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::App(f, args) if args.is_empty() => f.parse().ok(),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => &**v == var,
            Term::App(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Rebuilds the term bottom-up, replacing every variable through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(&Sym) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::App(name, args) if args.is_empty() => Term::App(name.clone(), args.clone()),
            Term::App(name, args) => {
                Term::App(name.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }

    /// Calls `f` on this term and every subterm, outermost first.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        if let Term::App(_, args) = self {
            args.iter().for_each(|a| a.visit(f));
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(name, args) => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
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
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Source of globally fresh variable names.
///
/// Generated names start with an underscore followed by a letter the parser
/// never produces for user variables, so they cannot clash with source text.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    next: u64,
}

impl FreshNames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn starting_at(next: u64) -> Self {
        FreshNames { next }
    }

    pub fn fresh(&mut self) -> Sym {
        let n = self.next;
        self.next += 1;
        Arc::from(format!("_G{n}"))
    }

    pub fn counter(&self) -> u64 {
        self.next
    }
}
