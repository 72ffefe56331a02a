mod common;

use std::collections::BTreeSet;

use common::{digraph, graph_signature, prenex_oracle, shape};
use proptest::prelude::*;
use robinson_core::fixtures;
use robinson_core::logic::{
    canonicalize, classify, parse_formula, satisfies_sentence, Budget, Formula, QuantifierClass,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn render_parse_round_trip(s in shape(&graph_signature(), 5)) {
        let sig = graph_signature();
        let phi = s.build(&["a".into(), "b".into()]);
        let text = phi.render(&sig);
        let back = parse_formula(&text, &sig).unwrap();
        prop_assert_eq!(&back, &phi, "{}", text);
    }

    #[test]
    fn classification_matches_prenex_oracle(s in shape(&graph_signature(), 5)) {
        let phi = s.build(&[]);
        prop_assert_eq!(classify(&phi).unwrap(), prenex_oracle(&phi));
    }

    #[test]
    fn negation_is_classical(s in shape(&graph_signature(), 4), n in 1usize..=3, mask: u32) {
        let g = digraph("G".into(), n, mask);
        let phi = s.build(&["0".into()]);
        let neg = Formula::not(phi.clone());
        prop_assert_eq!(satisfies_sentence(&g, &neg).unwrap(), !satisfies_sentence(&g, &phi).unwrap());
    }

    #[test]
    fn canonical_forms_keep_truth_and_size(s in shape(&graph_signature(), 4), n in 1usize..=3, mask: u32) {
        let sig = graph_signature();
        let g = digraph("G".into(), n, mask);
        let params = vec!["0".to_string()];
        let phi = s.build(&params);
        let c = canonicalize(&phi, &sig, &params);
        prop_assert!(c.size() <= phi.size());
        prop_assert_eq!(satisfies_sentence(&g, &c).unwrap(), satisfies_sentence(&g, &phi).unwrap());
    }
}

#[test]
fn pools_are_sentences_within_budget() {
    let sig = fixtures::order_signature();
    let params = vec!["0".to_string(), "1".to_string()];
    let b = Budget::new(5).with_param_size(4);
    let pool = b.pool(&sig, &params);
    assert!(!pool.is_empty());
    let distinct: BTreeSet<String> = pool.iter().map(|f| f.render(&sig)).collect();
    assert_eq!(distinct.len(), pool.len());
    for f in &pool {
        assert!(f.is_sentence() && b.admits(f), "{}", f.render(&sig));
    }
}

#[test]
fn oracle_examples() {
    let sig = fixtures::order_signature();
    let p = |t: &str| prenex_oracle(&parse_formula(t, &sig).unwrap());
    assert_eq!(p("E x. x < x"), QuantifierClass::Sigma1);
    assert_eq!(p("A x. E y. x < y"), QuantifierClass::Pi2);
    assert_eq!(p("(A x. x = x) & (E y. y < y)"), QuantifierClass::Pi2);
    assert_eq!(p("E x. A y. x < y"), QuantifierClass::Other);
}
