mod common;

use common::oracle::{beta_eta, to_db};
use proptest::prelude::*;
use tyiso::lambda::*;
use tyiso::paths::{DPath, Dir, PathSet};
use tyiso::syntax::parse_term;

fn p(s: &str) -> Term {
    parse_term(s).unwrap()
}

#[test]
fn normal_forms() {
    assert!(alpha_eq(&beta_nf(&p("(\\x. x) y"), 10).unwrap(), &p("y")));
    assert!(alpha_eq(&beta_eta_nf(&p("\\x y. x y"), 10).unwrap(), &p("\\x. x")));
    assert!(alpha_eq(&beta_nf(&p("(\\x y. x) y"), 10).unwrap(), &p("\\z. y")));
    assert_eq!(beta_nf(&p("(\\x. x x) (\\x. x x)"), 50).unwrap_err(), LambdaError::BudgetExceeded(50));
}

#[test]
fn permutators() {
    let swap = p("\\x y1 y2. x y2 y1");
    let s = recognize_fhp(&swap).unwrap();
    assert_eq!(s.to_string(), "(2 1)");
    assert_eq!(fhp_inverse(&s), s);
    assert!(recognize_fhp(&p("\\x y. x y y")).is_err());
    assert!(recognize_fhp(&p("\\x y. y x")).is_err());
    assert!(is_linear(&swap) && !is_linear(&p("\\x. x x")));
    let both: PathSet = [DPath(vec![Dir::L]), DPath(vec![Dir::R])].into_iter().collect();
    assert!(alpha_eq(&fhi_of_set(&both), &p("\\x y. x y")));
    assert_eq!(dpaths_of_fhi(&p("\\x y. x y")).unwrap(), both);
    assert!(dpaths_of_fhi(&swap).is_err());
}

fn arb_shape() -> impl Strategy<Value = FhpShape> {
    Just(FhpShape::identity()).prop_recursive(3, 24, 3, |inner| {
        (1usize..=3).prop_flat_map(move |n| {
            (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(inner.clone(), n))
                .prop_map(move |(perm, subs)| FhpShape { arity: n, perm, subs })
        })
    })
}

fn arb_term() -> impl Strategy<Value = Term> {
    let var = prop_oneof![Just("x"), Just("y"), Just("z")];
    var.clone().prop_map(Term::var).prop_recursive(5, 24, 2, move |inner| {
        prop_oneof![
            (var.clone(), inner.clone()).prop_map(|(x, b)| Term::abs(x, b)),
            (inner.clone(), inner).prop_map(|(f, a)| Term::app(f, a)),
        ]
    })
}

fn arb_paths() -> impl Strategy<Value = PathSet> {
    let path = proptest::collection::vec(prop_oneof![Just(Dir::L), Just(Dir::R)], 0..4).prop_map(DPath);
    proptest::collection::btree_set(path, 1..4)
}

proptest! {
    #[test]
    fn agrees_with_reference_normaliser(t in arb_term()) {
        let ours = beta_eta_nf(&t, 2000);
        let theirs = beta_eta(&to_db(&t), 2000);
        if let (Ok(a), Some(b)) = (ours, theirs) {
            prop_assert_eq!(to_db(&a), b);
        }
    }

    #[test]
    fn shapes_round_trip(s in arb_shape()) {
        let t = fhp_term(&s);
        prop_assert!(is_linear(&t));
        prop_assert_eq!(recognize_fhp(&t).unwrap(), s.clone());
        let inv = fhp_term(&fhp_inverse(&s));
        let id = Some(to_db(&Term::identity()));
        prop_assert_eq!(beta_eta(&to_db(&compose_terms(&t, &inv)), 10_000), id.clone());
        prop_assert_eq!(beta_eta(&to_db(&compose_terms(&inv, &t)), 10_000), id);
    }

    #[test]
    fn composition_is_closed(a in arb_shape(), b in arb_shape()) {
        let c = fhp_compose(&a, &b).unwrap();
        let direct = beta_eta(&to_db(&compose_terms(&fhp_term(&a), &fhp_term(&b))), 10_000);
        prop_assert_eq!(beta_eta(&to_db(&fhp_term(&c)), 10_000), direct);
    }

    #[test]
    fn identities_from_paths(ps in arb_paths()) {
        let id = fhi_of_set(&ps);
        prop_assert!(common::oracle::is_identity(&id));
        let back = dpaths_of_fhi(&id).unwrap();
        prop_assert!(alpha_eq(&fhi_of_set(&back), &id));
        for q in &ps {
            prop_assert!(back.iter().any(|r| r.0.starts_with(&q.0)));
        }
    }
}
