mod common;

use common::oracle::entails;
use proptest::prelude::*;
use tyiso::rewrite::*;
use tyiso::rewrite::Strategy;
use tyiso::syntax::parse_type;
use tyiso::type_core::TypeExpr;

fn t(s: &str) -> TypeExpr {
    parse_type(s).unwrap()
}

fn arrow_free(x: &TypeExpr) -> bool {
    match x {
        TypeExpr::Atom(_) => true,
        TypeExpr::Arrow(..) => false,
        TypeExpr::And(l, r) | TypeExpr::Or(l, r) => arrow_free(l) && arrow_free(r),
    }
}

#[test]
fn strategies_parse() {
    assert_eq!("lo".parse::<Strategy>().unwrap(), Strategy::LeftmostOutermost);
    assert_eq!("rightmost-innermost".parse::<Strategy>().unwrap(), Strategy::RightmostInnermost);
    assert!("sideways".parse::<Strategy>().is_err());
}

#[test]
fn limits() {
    let cfg = RewriteConfig { step_budget: 1, ..RewriteConfig::default() };
    assert_eq!(normalize_with(&t("a -> (b & c) | d"), Strategy::LeftmostOutermost, &cfg).unwrap_err(), RewriteError::StepBudgetExceeded(1));
    assert!(matches!(apply(&t("a"), &find_redexes(&t("a -> b & c"))[0]), Err(RewriteError::InvalidRedex(_))));
}

#[test]
fn erasure_respects_paths() {
    // The comparison happens inside an arrow whose sibling blocks the path.
    let x = t("((a -> b) & (a & c -> b) -> d) & e");
    assert!(is_normal(&x));
    let y = t("(a -> b) & (a & c -> b) -> d");
    assert_eq!(normalize(&y, Strategy::LeftmostOutermost).unwrap().0, t("(a -> b) -> d"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn traces_replay(x in common::arb_type(4, 5), seed in any::<u64>()) {
        let (nf, tr) = normalize(&x, Strategy::Random(seed)).unwrap();
        let mut cur = x.clone();
        for st in &tr.steps {
            prop_assert_eq!(&st.before, &cur);
            prop_assert_eq!(&st.redex.context.plug(&st.redex.focus), &cur);
            cur = apply(&cur, &st.redex).unwrap();
            prop_assert_eq!(&cur, &st.after);
        }
        prop_assert_eq!(&cur, &nf);
        prop_assert!(is_normal(&nf));
        prop_assert!(has_normal_shape(&nf));
        let (again, tr2) = normalize(&nf, Strategy::LeftmostOutermost).unwrap();
        prop_assert_eq!(again, nf);
        prop_assert!(tr2.steps.is_empty());
    }

    #[test]
    fn strategies_agree(x in common::arb_type(4, 5), seed in any::<u64>()) {
        let a = canonical_ac(&normalize(&x, Strategy::LeftmostOutermost).unwrap().0);
        let b = canonical_ac(&normalize(&x, Strategy::RightmostInnermost).unwrap().0);
        let c = canonical_ac(&normalize(&x, Strategy::Random(seed)).unwrap().0);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &c);
        prop_assert_eq!(canonical_ac(&a), a);
    }

    #[test]
    fn arrow_free_types_keep_their_meaning(x in common::arb_type(4, 5)) {
        prop_assume!(arrow_free(&x));
        let (nf, _) = normalize(&x, Strategy::LeftmostOutermost).unwrap();
        prop_assert!(entails(&x, &nf) && entails(&nf, &x));
    }

    #[test]
    fn ac_trace_replays(x in common::arb_type(4, 5)) {
        let (nf, _) = normalize(&x, Strategy::LeftmostOutermost).unwrap();
        let (canon, tr) = ac_canonical_trace(&nf);
        let mut cur = nf;
        for st in &tr.steps {
            prop_assert_eq!(st.redex.rule, RuleId::AcReorder);
            cur = apply(&cur, &st.redex).unwrap();
        }
        prop_assert_eq!(cur, canon);
    }
}
