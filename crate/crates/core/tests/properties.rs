mod common;

use std::collections::{BTreeSet, HashMap, HashSet};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tense_abduction::engine::{check_model, enumerate_models, SolveConfig};
use tense_abduction::kr::{parse_formula, parse_theory};
use tense_abduction::logic::{is_nnf, sym, to_nnf, unify, Atom, Formula, Substitution, Term};
use tense_abduction::temporal::{Pt, Store, TimePoint};

use common::{eval, tuples};

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (prop::sample::select(vec!["f", "g"]), prop::collection::vec(inner, 1..=2))
            .prop_map(|(f, args)| Term::app(f, args))
    })
}

proptest! {
    #[test]
    fn unifiers_are_symmetric_and_unify(a in term(), b in term()) {
        let s = Substitution::new();
        let ab = unify(&a, &b, &s);
        let ba = unify(&b, &a, &s);
        prop_assert_eq!(ab.is_some(), ba.is_some());
        if let Some(m) = ab {
            prop_assert_eq!(m.resolve(&a), m.resolve(&b));
        }
    }
}

/// Formulas over p/1 and q/2 with constants a, b.
fn formula() -> impl Strategy<Value = Formula> {
    let arg = prop_oneof![
        prop::sample::select(vec!["X", "Y"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
    ];
    let leaf = prop_oneof![
        arg.clone().prop_map(|t| Formula::atom("p", vec![t])),
        (arg.clone(), arg.clone()).prop_map(|(s, t)| Formula::atom("q", vec![s, t])),
        (arg.clone(), arg).prop_map(|(s, t)| Formula::Eq(s, t)),
        Just(Formula::True),
        Just(Formula::False),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let var = prop::sample::select(vec!["X", "Y"]).prop_map(sym);
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Equiv(Box::new(a), Box::new(b))),
            (var.clone(), inner.clone()).prop_map(|(v, f)| Formula::Exists(vec![v], Box::new(f))),
            (var, inner).prop_map(|(v, f)| Formula::Forall(vec![v], Box::new(f))),
        ]
    })
}

fn closed(f: &Formula) -> Formula {
    Formula::forall(f.free_vars().into_iter().collect(), f.clone())
}

fn interpretation(bits: u32) -> impl Fn(&Atom) -> bool {
    let domain = [Term::constant("a"), Term::constant("b")];
    let mut ground = Vec::new();
    for t in tuples(&domain, 1) {
        ground.push(Atom::new("p", t));
    }
    for t in tuples(&domain, 2) {
        ground.push(Atom::new("q", t));
    }
    let truth: HashSet<Atom> = ground.into_iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, a)| a).collect();
    move |a: &Atom| truth.contains(a)
}

proptest! {
    #[test]
    fn nnf_preserves_truth(f in formula(), bits in 0u32..64) {
        let domain = [Term::constant("a"), Term::constant("b")];
        let n = to_nnf(&f);
        prop_assert!(is_nnf(&n));
        let truth = interpretation(bits);
        let env = HashMap::new();
        prop_assert_eq!(eval(&closed(&f), &env, &truth, &domain), eval(&closed(&n), &env, &truth, &domain));
    }

    #[test]
    fn printing_round_trips(f in formula(), bits in 0u32..64) {
        let printed = f.to_string();
        let back = parse_formula(&printed).map_err(|e| TestCaseError::fail(format!("{e}: {printed}")))?;
        prop_assert_eq!(back.to_string(), printed);
        let domain = [Term::constant("a"), Term::constant("b")];
        let truth = interpretation(bits);
        let env = HashMap::new();
        prop_assert_eq!(eval(&closed(&f), &env, &truth, &domain), eval(&closed(&back), &env, &truth, &domain));
    }

    #[test]
    fn hours_are_monotone_and_invertible(a in -2_000_000i64..2_000_000, d in 1i64..100_000) {
        let p = TimePoint::from_hours(a).unwrap();
        let q = TimePoint::from_hours(a + d).unwrap();
        prop_assert!(p < q);
        prop_assert_eq!(p.to_hours(), a);
        prop_assert_eq!(TimePoint::new(p.year, p.month, p.day, p.hour).unwrap(), p);
    }
}

#[derive(Clone, Debug)]
enum Constraint {
    Le(usize, usize, i64),
    Aligned(usize),
}

fn holds(c: &Constraint, v: &[i64]) -> bool {
    match *c {
        Constraint::Le(i, j, k) => v[i] - v[j] <= k,
        Constraint::Aligned(i) => v[i].rem_euclid(24) == 0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Consistency agrees with brute force over a bounded window, and any
    /// labelling satisfies every posted constraint.
    #[test]
    fn store_decides_exactly(
        n in 1usize..=3,
        raw in prop::collection::vec((0usize..3, 0usize..3, -30i64..30, prop::bool::weighted(0.15)), 0..6),
        anchor in 0i64..60,
    ) {
        let window = 0i64..=60;
        let cs: Vec<Constraint> = raw
            .into_iter()
            .map(|(i, j, k, aligned)| if aligned { Constraint::Aligned(i % n) } else { Constraint::Le(i % n, j % n, k) })
            .collect();
        let mut store = Store::new();
        let nodes: Vec<usize> = (0..n).map(|_| store.new_var()).collect();
        let pt = |i: usize| Pt::var(nodes[i]);
        let mut ok = true;
        for i in 0..n {
            ok &= store.le(Pt::fixed(*window.start()), pt(i), 0).is_ok();
            ok &= store.le(pt(i), Pt::fixed(*window.end()), 0).is_ok();
        }
        for c in &cs {
            ok &= match *c {
                Constraint::Le(i, j, k) => store.le(pt(i), pt(j), k).is_ok(),
                Constraint::Aligned(i) => store.align(pt(i)).is_ok(),
            };
        }
        let brute = tuples(&window.clone().map(Term::int).collect::<Vec<_>>(), n)
            .iter()
            .map(|vals| vals.iter().map(|t| t.as_int().unwrap()).collect::<Vec<i64>>())
            .any(|v| cs.iter().all(|c| holds(c, &v)));
        let labelled = if ok { store.label(anchor).ok() } else { None };
        prop_assert_eq!(labelled.is_some(), brute);
        if let Some(values) = labelled {
            prop_assert!(store.satisfied_by(&values));
            let v: Vec<i64> = nodes.iter().map(|&k| values[k]).collect();
            prop_assert!(cs.iter().all(|c| holds(c, &v)));
            prop_assert!(v.iter().all(|x| window.contains(x)));
        }
    }
}

/// A random propositional theory: open atoms o0..o3, defined atoms d0, d1
/// (d1 may use d0) and a few axioms.
fn propositional_theory(rng: &mut StdRng) -> (String, Vec<(String, Vec<Vec<(bool, String)>>)>, Vec<Formula>) {
    let open: Vec<String> = (0..4).map(|i| format!("o{i}(a)")).collect();
    let mut source = String::new();
    let mut defs = Vec::new();
    let mut known = open.clone();
    for d in 0..2 {
        let head = format!("d{d}(a)");
        let mut rules = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let body: Vec<(bool, String)> =
                (0..rng.gen_range(1..=2)).map(|_| (rng.gen_bool(0.7), known[rng.gen_range(0..known.len())].clone())).collect();
            let text: Vec<String> = body.iter().map(|(pos, a)| if *pos { a.clone() } else { format!("not {a}") }).collect();
            source.push_str(&format!("{head} <- {}.\n", text.join(" & ")));
            rules.push(body);
        }
        defs.push((head.clone(), rules));
        known.push(head);
    }
    let mut axioms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let lits: Vec<String> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let a = known[rng.gen_range(0..known.len())].clone();
                if rng.gen_bool(0.6) { a } else { format!("not {a}") }
            })
            .collect();
        let text = lits.join(" ; ");
        source.push_str(&format!("fol {text}.\n"));
        axioms.push(parse_formula(&text).unwrap());
    }
    (source, defs, axioms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    /// The distinct answers are exactly the subset-minimal truth-table models
    /// (restricted to the open atoms), and each passes the model check.
    #[test]
    fn propositional_answers_are_minimal_models(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (source, defs, axioms) = propositional_theory(&mut rng);
        let open: Vec<String> = (0..4).map(|i| format!("o{i}(a)")).collect();

        let mut models: Vec<BTreeSet<String>> = Vec::new();
        for mask in 0u32..16 {
            let mut truth: HashSet<String> =
                open.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect();
            for (head, rules) in &defs {
                let derived = rules.iter().any(|body| body.iter().all(|(pos, a)| truth.contains(a) == *pos));
                if derived {
                    truth.insert(head.clone());
                }
            }
            let by_atom = |a: &Atom| truth.contains(&a.to_string());
            if axioms.iter().all(|f| eval(f, &HashMap::new(), &by_atom, &[])) {
                models.push(truth.into_iter().filter(|a| a.starts_with('o')).collect());
            }
        }
        let minimal: BTreeSet<BTreeSet<String>> = models
            .iter()
            .filter(|m| !models.iter().any(|o| o.len() < m.len() && o.is_subset(m)))
            .cloned()
            .collect();

        let theory = parse_theory(&source).unwrap();
        let answers = enumerate_models(&theory, &Formula::True, usize::MAX, SolveConfig::default()).unwrap();
        let got: BTreeSet<BTreeSet<String>> =
            answers.iter().map(|a| a.atoms().map(ToString::to_string).collect()).collect();
        prop_assert_eq!(got.len(), answers.len(), "duplicate answers for\n{}", source);
        prop_assert_eq!(&got, &minimal, "theory:\n{}", source);
        for a in &answers {
            prop_assert!(check_model(&theory, a).unwrap(), "unsound answer {} for\n{}", a, source);
        }
    }
}
