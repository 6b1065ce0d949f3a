use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::logic::{Atom, Sym, Term};
use crate::temporal::TimePoint;

/// One model: the abduced extension of every open predicate, the values of
/// the query's free variables and the labels chosen for time points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    extensions: BTreeMap<Sym, Vec<Atom>>,
    bindings: Vec<(Sym, Term)>,
    labels: BTreeMap<Sym, TimePoint>,
    store_replay: bool,
}

impl Answer {
    /// Atoms are deduplicated and sorted by their printed form.
    pub fn new(
        extensions: BTreeMap<Sym, Vec<Atom>>,
        bindings: Vec<(Sym, Term)>,
        labels: BTreeMap<Sym, TimePoint>,
        store_replay: bool,
    ) -> Answer {
        let extensions = extensions
            .into_iter()
            .map(|(p, atoms)| {
                let mut keyed: Vec<(String, Atom)> = atoms.into_iter().map(|a| (a.to_string(), a)).collect();
                keyed.sort_by(|x, y| x.0.cmp(&y.0));
                keyed.dedup_by(|x, y| x.0 == y.0);
                (p, keyed.into_iter().map(|(_, a)| a).collect())
            })
            .collect();
        Answer { extensions, bindings, labels, store_replay }
    }

    pub fn extensions(&self) -> &BTreeMap<Sym, Vec<Atom>> {
        &self.extensions
    }

    pub fn extension(&self, pred: &str) -> &[Atom] {
        self.extensions.get(pred).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.extensions.values().flatten()
    }

    pub fn bindings(&self) -> &[(Sym, Term)] {
        &self.bindings
    }

    pub fn binding(&self, var: &str) -> Option<&Term> {
        self.bindings.iter().find(|(v, _)| &**v == var).map(|(_, t)| t)
    }

    pub fn labels(&self) -> &BTreeMap<Sym, TimePoint> {
        &self.labels
    }

    /// Whether the final labelling satisfies every constraint posted to the
    /// temporal store during the search.
    pub fn store_replay(&self) -> bool {
        self.store_replay
    }

    /// Replaces one atom of an extension. Used to build counter-models.
    pub fn with_atom_replaced(&self, old: &Atom, new: Atom) -> Answer {
        let mut ext = self.extensions.clone();
        if let Some(list) = ext.get_mut(&old.pred) {
            list.retain(|a| a != old);
        }
        ext.entry(new.pred.clone()).or_default().push(new);
        Answer::new(ext, self.bindings.clone(), self.labels.clone(), self.store_replay)
    }

    pub fn without_atom(&self, old: &Atom) -> Answer {
        let mut ext = self.extensions.clone();
        if let Some(list) = ext.get_mut(&old.pred) {
            list.retain(|a| a != old);
        }
        Answer::new(ext, self.bindings.clone(), self.labels.clone(), self.store_replay)
    }

    /// The extensions with every interval and time point blanked out, so
    /// that models differing only in their labelling compare equal.
    pub fn relational_key(&self) -> BTreeSet<String> {
        self.atoms().map(|a| blank_time(&a.as_term()).to_string()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(AnswerDoc::from(self)).expect("answer documents serialize")
    }
}

fn blank_time(t: &Term) -> Term {
    match t {
        Term::App(f, args) if (&**f == "int" && args.len() == 2) || (&**f == "ts" && args.len() == 4) => {
            Term::constant("_")
        }
        Term::App(f, args) => Term::app_sym(f.clone(), args.iter().map(blank_time).collect()),
        v => v.clone(),
    }
}

/// `pred : [atom, ...]` per nonempty extension, predicates in order.
impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, atoms) in &self.extensions {
            if atoms.is_empty() {
                continue;
            }
            let items: Vec<String> = atoms.iter().map(ToString::to_string).collect();
            writeln!(f, "{p} : [{}]", items.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct AnswerDoc {
    extensions: BTreeMap<String, Vec<String>>,
    bindings: BTreeMap<String, String>,
    labels: BTreeMap<String, String>,
    store_replay: bool,
}

impl From<&Answer> for AnswerDoc {
    fn from(a: &Answer) -> AnswerDoc {
        AnswerDoc {
            extensions: a
                .extensions
                .iter()
                .filter(|(_, v)| !v.is_empty())
                .map(|(p, v)| (p.to_string(), v.iter().map(ToString::to_string).collect()))
                .collect(),
            bindings: a.bindings.iter().map(|(v, t)| (v.to_string(), t.to_string())).collect(),
            labels: a.labels.iter().map(|(v, p)| (v.to_string(), p.to_string())).collect(),
            store_replay: a.store_replay,
        }
    }
}
