use tense_abduction::engine::{check_model, check_model_with_query, enumerate_models, solve, SolveConfig, SolveError};
use tense_abduction::kr::{parse_formula, parse_theory};

fn models(theory: &str, query: &str) -> Vec<String> {
    let t = parse_theory(theory).unwrap();
    let q = parse_formula(query).unwrap();
    enumerate_models(&t, &q, usize::MAX, SolveConfig::default())
        .unwrap()
        .iter()
        .map(|a| {
            assert!(check_model_with_query(&t, a, Some(&q)).unwrap(), "unsound answer {a}");
            a.to_string()
        })
        .collect()
}

#[test]
fn abduces_abnormality() {
    let m = models("transposed(W) <- abnormal(ab_transposed(W)).", "transposed(evt(w1))");
    assert_eq!(m, vec!["abnormal : [abnormal(ab_transposed(evt(w1)))]\n"]);
}

#[test]
fn denial_blocks_abduction() {
    let m = models(
        "transposed(W) <- abnormal(ab_transposed(W)). fol not abnormal(ab_transposed(evt(w1))).",
        "transposed(evt(w1))",
    );
    assert!(m.is_empty());
}

#[test]
fn empty_theory_true_query() {
    assert_eq!(models("", "true"), vec![String::new()]);
}

#[test]
fn totality_needs_an_atom() {
    let m = models("fol exists(U)$ utt(U).", "true");
    assert_eq!(m.len(), 1);
    assert!(m[0].starts_with("utt : [utt("));
}

#[test]
fn disjunction_gives_two_minimal_models() {
    let m = models("fol p(a) ; q(a).", "true");
    assert_eq!(m, vec!["p : [p(a)]\n", "q : [q(a)]\n"]);
}

#[test]
fn universal_axiom_fires_on_later_atoms() {
    let m = models("fol forall(X)$ p(X) => q(X). fol p(a). fol p(b).", "true");
    assert_eq!(m, vec!["p : [p(a), p(b)]\nq : [q(a), q(b)]\n"]);
}

#[test]
fn open_function_is_total_and_unique() {
    let src = "d(a). d(b). r(X) <- X = c ; X = e. of f:: d(_) -> r(_).";
    let m = models(src, "true");
    assert_eq!(m.len(), 4);
    for s in &m {
        assert_eq!(s.matches("f(").count(), 2, "{s}");
    }
}

#[test]
fn temporal_constraints_are_labelled() {
    let t = parse_theory("").unwrap();
    let q = parse_formula("day_a(Y) & day_a(T) & meets(Y,T) & within(P,T) & point(P)").unwrap();
    let mut sols = solve(&t, &q, SolveConfig::default()).unwrap();
    let a = sols.next().unwrap().unwrap();
    assert_eq!(a.binding("Y").unwrap().to_string(), "int(ts(1999,1,1,0),ts(1999,1,2,0))");
    assert_eq!(a.binding("T").unwrap().to_string(), "int(ts(1999,1,2,0),ts(1999,1,3,0))");
    assert_eq!(a.binding("P").unwrap().to_string(), "int(ts(1999,1,2,0),ts(1999,1,2,1))");
    assert!(a.store_replay());
    assert!(check_model_with_query(&t, &a, Some(&q)).unwrap());
}

#[test]
fn inconsistent_intervals_fail() {
    let m = models("", "day_a(Y) & point(P) & within(P,Y) & before(Y,P)");
    assert!(m.is_empty());
}

#[test]
fn budget_is_reported() {
    let t = parse_theory("n(z). n(s(X)) <- n(X).").unwrap();
    let q = parse_formula("n(X) & X = a").unwrap();
    let cfg = SolveConfig { budget: 1000, ..SolveConfig::default() };
    let r: Result<Vec<_>, _> = solve(&t, &q, cfg).unwrap().collect();
    assert!(matches!(r, Err(SolveError::BudgetExhausted(1000))));
}

#[test]
fn checker_rejects_missing_witness() {
    let t = parse_theory("fol exists(U)$ utt(U).").unwrap();
    let q = parse_formula("true").unwrap();
    let a = solve(&parse_theory("").unwrap(), &q, SolveConfig::default()).unwrap().next().unwrap().unwrap();
    assert!(!check_model(&t, &a).unwrap());
}
