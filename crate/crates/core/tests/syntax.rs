mod common;

use proptest::prelude::*;
use tyiso::lambda::alpha_eq;
use tyiso::paths::{format_path_set, TypeContext};
use tyiso::syntax::*;
use tyiso::type_core::{and, arrow, atom, or};

#[test]
fn precedence() {
    let t = parse_type("a -> b -> c & d | e").unwrap();
    assert_eq!(t, arrow(atom("a"), arrow(atom("b"), or(and(atom("c"), atom("d")), atom("e")))));
    assert_eq!(print_type(&t), "a -> b -> c & d | e");
    assert_eq!(print_type(&parse_type("(a -> b) -> c").unwrap()), "(a -> b) -> c");
    assert_eq!(print_type(&parse_type("a & (b & c)").unwrap()), "a & (b & c)");
}

#[test]
fn errors_carry_spans() {
    let e = parse_type("a -> (b").unwrap_err();
    assert!(e.span.start <= e.span.end);
    assert!(parse_type("").is_err());
    assert!(parse_term("\\x.").is_err());
    assert!(parse_context("a -> b").is_err());
    assert!(parse_context("[] -> []").is_err());
}

#[test]
fn terms_and_paths() {
    let t = parse_term("\\x y. x y").unwrap();
    assert_eq!(print_term(&t), "\\x y. x y");
    assert!(alpha_eq(&t, &parse_term("λa b. a b").unwrap()));
    let ps = parse_path_set("{L, RL, ε}").unwrap();
    assert_eq!(format_path_set(&ps), "{ε, L, RL}");
    let c = parse_context("a -> [] & b").unwrap();
    assert_eq!(print_context(&c), "a -> [] & b");
    assert!(!c.is_hole() && TypeContext::hole().is_hole());
}

proptest! {
    #[test]
    fn print_parse_round_trip(t in common::arb_type(5, 6)) {
        let s = print_type(&t);
        prop_assert_eq!(parse_type(&s).unwrap(), t.clone());
        prop_assert_eq!(t.to_string(), s);
    }

    #[test]
    fn path_round_trip(p in proptest::collection::vec(prop_oneof![Just('L'), Just('R')], 0..6)) {
        let s: String = p.iter().collect();
        let d = parse_dpath(if s.is_empty() { "ε" } else { &s }).unwrap();
        prop_assert_eq!(d.len(), p.len());
        let printed = d.to_string();
        prop_assert_eq!(parse_dpath(&printed).unwrap(), d);
    }
}
