mod common;

use std::collections::{BTreeSet, HashMap};

use tense_abduction::dutch::{load_theory, validate_annotation, Annotation, Diagnostic};
use tense_abduction::engine::{check_model, enumerate_models, solve, Answer, SolveConfig};
use tense_abduction::kr::{completion, parse_formula, Theory};
use tense_abduction::logic::{Atom, Formula, Term};

use common::*;

const IN_EEN_UUR: &str = include_str!("../annotations/in_een_uur.kr");

fn models(src: &str) -> (Theory, Vec<Answer>) {
    let theory = sentence(src);
    let ms = enumerate_models(&theory, &Formula::True, usize::MAX, SolveConfig::default()).unwrap();
    (theory, ms)
}

#[test]
fn open_predicates_of_the_bundled_theory() {
    let t = load_theory();
    for p in ["adjunct_verb", "evttime", "loc", "s_ppp", "time_period", "token_verb", "abnormal", "result"] {
        assert!(t.is_open(p), "{p} should be open");
    }
    for p in ["subst", "utt", "v_ppp", "evt_ppp", "clause", "verb_lex", "s_verb"] {
        assert!(t.is_defined(p), "{p} should be defined");
    }
}

#[test]
fn vacuous_verbs_are_the_temporal_auxiliaries() {
    let t = load_theory();
    let comp = completion(t.definition("verb_vacuous").unwrap());
    let verbs: Vec<Term> = t.definition("verb_lex").unwrap().rules.iter().map(|r| r.head.args[0].clone()).collect();
    let vacuous: BTreeSet<String> = verbs
        .iter()
        .filter(|v| {
            let probe = Atom::new("verb_vacuous", vec![(*v).clone()]);
            // The completion forces the truth value: it fails when flipped.
            let with = |on: bool| {
                let truth = |a: &Atom| if *a == probe { on } else { a.pred.as_ref() == "verb_vacuous" && is_listed(&t, a) };
                eval(&comp, &HashMap::new(), &truth, &verbs)
            };
            with(true) && !with(false)
        })
        .map(|v| v.to_string())
        .collect();
    let want: BTreeSet<String> = ["t_hebben", "t_zijn", "t_zullen"].map(String::from).into();
    assert_eq!(vacuous, want);
}

fn is_listed(t: &Theory, a: &Atom) -> bool {
    t.definition(&a.pred).unwrap().rules.iter().any(|r| r.head == *a)
}

#[test]
fn loading_is_deterministic() {
    assert_eq!(load_theory().to_string(), load_theory().to_string());
}

#[test]
fn s1_annotation_is_well_formed() {
    let a = Annotation::parse(S1).unwrap();
    assert!(validate_annotation(&a, &load_theory()).is_empty());
}

#[test]
fn unknown_lexeme_is_reported() {
    let a = Annotation::parse(&format!("{S1}\nverbt_word(w3,blah) <- true.\nmorf(w3,infinitive) <- true.")).unwrap();
    let d = validate_annotation(&a, &load_theory());
    assert_eq!(d, vec![Diagnostic::UnknownLexeme { token: "w3".into(), word: "blah".into() }]);
}

#[test]
fn auxiliary_cycle_is_reported() {
    let a = Annotation::parse(&format!("{S1}\naux_verb(w1,w2) <- true.")).unwrap();
    let d = validate_annotation(&a, &load_theory());
    assert!(d.contains(&Diagnostic::AuxCycle { token: "w1".into() }), "{d:?}");
    assert!(d.contains(&Diagnostic::AuxCycle { token: "w2".into() }), "{d:?}");
}

#[test]
fn missing_main_verb_and_morphology_are_reported() {
    let src = "clause(s1) <- true.\nverbt_word(w1,zijn) <- true.\nverbt_word(w1,hebben) <- true.";
    let d = validate_annotation(&Annotation::parse(src).unwrap(), &load_theory());
    assert!(d.contains(&Diagnostic::MainVerbCount { clause: "s1".into(), found: 0 }), "{d:?}");
    assert!(d.contains(&Diagnostic::WordCount { token: "w1".into(), found: 2 }), "{d:?}");
    assert!(d.contains(&Diagnostic::MorfCount { token: "w1".into(), found: 0 }), "{d:?}");
}

#[test]
fn annotations_hold_only_facts() {
    assert!(Annotation::parse("clause(S) <- true.").is_err());
    assert!(Annotation::parse("fol clause(s1).").is_err());
    assert!(Annotation::parse("token_verb(w1,v_zijn) <- true.").is_err());
}

/// Eventuality invariants, read directly off the extensions.
fn assert_eventuality_invariants(theory: &Theory, m: &Answer) {
    let evts: BTreeSet<String> = m
        .extension("evttime")
        .iter()
        .chain(m.extension("loc"))
        .map(|a| a.args[0].to_string())
        .filter(|e| e != "utt")
        .collect();
    for e in &evts {
        let t = hours(&value_of(m, "evttime", &[e]));
        let l = hours(&value_of(m, "loc", &[e]));
        assert!(overlap(t, l), "{e}: {t:?} does not overlap {l:?}");
        let w = e.trim_start_matches("evt(").trim_end_matches(')');
        let v = value_of(m, "token_verb", &[w]).to_string();
        if theory.definition("verb_telic").unwrap().rules.iter().any(|r| r.head.args[0].to_string() == v) {
            assert!(within(t, l), "telic {e}: {t:?} not within {l:?}");
        }
    }
}

#[test]
fn eventualities_have_unique_overlapping_times() {
    for src in [S1, NA_GISTEREN, HAD_GEWERKT, IN_EEN_UUR] {
        let (theory, ms) = models(src);
        assert!(!ms.is_empty());
        for m in &ms {
            assert_eventuality_invariants(&theory, m);
            assert!(check_model(&theory, m).unwrap(), "{m}");
        }
    }
}

#[test]
fn s1_has_no_aspectual_reading() {
    let (_, ms) = models(S1);
    for m in &ms {
        assert!(m.extension("result").is_empty(), "{m}");
        let l = hours(&value_of(m, "loc", &["evt(w1)"]));
        let p = hours(&value_of(m, "s_ppp", &["s1"]));
        assert!(before(l, p), "vacuous perfect: loc {l:?} should precede ppp {p:?}");
    }
}

#[test]
fn each_adjunct_modifies_one_substantive_verb_of_its_clause() {
    for src in [S1, NA_GISTEREN, HAD_GEWERKT, IN_EEN_UUR] {
        let (_, ms) = models(src);
        let ann = Annotation::parse(src).unwrap();
        for m in &ms {
            for args in ann.facts("s_adjunct") {
                let w = value_of(m, "adjunct_verb", &[&args[1].to_string()]).to_string();
                let v = value_of(m, "token_verb", &[&w]).to_string();
                assert!(!v.starts_with("t_"), "adjunct on vacuous {w} ({v})");
            }
        }
    }
}

#[test]
fn two_substantive_verbs_give_a_choice_of_attachment() {
    let (_, ms) = models(HAD_GEWERKT);
    let attachments: BTreeSet<String> =
        ms.iter().map(|m| value_of(m, "adjunct_verb", &["a1"]).to_string()).collect();
    assert_eq!(attachments, ["w1", "w2"].map(String::from).into());
}

#[test]
fn in_adjunct_bounds_the_eventuality_time() {
    let (_, ms) = models(IN_EEN_UUR);
    assert!(!ms.is_empty());
    for m in &ms {
        let Term::App(_, args) = value_of(m, "time_period", &["a1"]) else { panic!() };
        let t = hours(&args[0]);
        assert_eq!(t.1 - t.0, 1);
        assert!(within(hours(&value_of(m, "evttime", &["evt(w1)"])), t));
    }
}

#[test]
fn temporal_reading_of_w1_is_not_a_model() {
    let (theory, ms) = models(S1);
    let m = &ms[0];
    let old = Atom::new("token_verb", vec![Term::constant("w1"), Term::constant("v_zijn")]);
    let new = Atom::new("token_verb", vec![Term::constant("w1"), Term::constant("t_zijn")]);
    assert!(check_model(&theory, m).unwrap());
    assert!(!check_model(&theory, &m.with_atom_replaced(&old, new)).unwrap());
}

#[test]
fn dropping_an_atom_breaks_the_model() {
    let (theory, ms) = models(S1);
    let m = &ms[0];
    for a in m.atoms() {
        assert!(!check_model(&theory, &m.without_atom(a)).unwrap(), "still a model without {a}");
    }
}

#[test]
fn runs_are_deterministic() {
    let theory = sentence(HAD_GEWERKT);
    let q = parse_formula("true").unwrap();
    let run = || -> Vec<String> {
        solve(&theory, &q, SolveConfig::default()).unwrap().map(|a| a.unwrap().to_string()).collect()
    };
    assert_eq!(run(), run());
}
