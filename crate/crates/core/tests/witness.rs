mod common;

use common::oracle::is_identity;
use proptest::prelude::*;
use tyiso::lambda::alpha_eq;
use tyiso::rewrite::{normalize, Strategy as Rw};
use tyiso::syntax::{parse_term, parse_type};
use tyiso::type_core::TypeExpr;
use tyiso::witness::*;

fn t(s: &str) -> TypeExpr {
    parse_type(s).unwrap()
}

#[test]
fn chained_identity_for_whole_trace() {
    let src = t("a -> (b & c) | d");
    let (_, tr) = normalize(&src, Rw::LeftmostOutermost).unwrap();
    let w = witness_trace(&src, &tr).unwrap();
    w.check().unwrap();
    assert!(is_identity(&w.forward_term) && is_identity(&w.backward_term));
    let back = w.inverse();
    assert_eq!((back.source.clone(), back.target.clone()), (w.target.clone(), w.source.clone()));
}

#[test]
fn swap_law() {
    let w = witness_basic_iso(Law::Swap, &[t("a"), t("b"), t("c")]).unwrap();
    w.check().unwrap();
    assert_eq!((w.source.clone(), w.target.clone()), (t("a -> b -> c"), t("b -> a -> c")));
    assert!(alpha_eq(&w.forward_nf(), &parse_term("\\x y1 y2. x y2 y1").unwrap()));
    assert!(matches!(witness_basic_iso(Law::Swap, &[t("a")]), Err(WitnessError::Arity { .. })));
}

#[test]
fn chains_must_connect() {
    let a = WitnessPair::identity(&t("a"));
    let b = WitnessPair::identity(&t("b"));
    assert!(matches!(chain(&t("a"), &[a.clone(), b]), Err(WitnessError::BrokenChain(..))));
    assert_eq!(chain(&t("a"), &[]).unwrap().source, t("a"));
    chain(&t("a"), &[a.clone(), a]).unwrap().check().unwrap();
}

#[test]
fn top_level_reordering() {
    let w = ac_witness(&t("(a -> b) & c & (d | e)"), &t("(e | d) & c & (a -> b)")).unwrap();
    w.check().unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn every_step_is_witnessed(x in common::arb_type(4, 5), seed in any::<u64>()) {
        let (_, tr) = normalize(&x, Rw::Random(seed)).unwrap();
        for st in &tr.steps {
            let (w, _) = witness_step_with_paths(st).unwrap();
            w.check().unwrap();
            prop_assert!(is_identity(&w.forward_term));
            prop_assert!(is_identity(&w.backward_term));
        }
        let whole = witness_trace(&x, &tr).unwrap();
        whole.check().unwrap();
        prop_assert!(is_identity(&whole.forward_term));
    }
}
