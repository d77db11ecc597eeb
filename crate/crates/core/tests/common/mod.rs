#![allow(dead_code)]

pub mod oracle;

use rand::seq::SliceRandom;
use rand::Rng;
use tyiso::type_core::{and, arrow, atom, or, TypeExpr};

pub const ATOMS: [&str; 5] = ["a", "b", "c", "d", "e"];

/// Random type whose syntax tree has depth at most `depth`, over the first
/// `atoms` atom names, with `∧`/`∨` spines of at most `spine` components.
pub fn random_type<R: Rng>(rng: &mut R, depth: usize, atoms: usize, spine: usize) -> TypeExpr {
    if depth <= 1 || rng.gen_bool(0.25) {
        return atom(ATOMS[rng.gen_range(0..atoms)]);
    }
    match rng.gen_range(0..3) {
        0 => arrow(random_type(rng, depth - 1, atoms, spine), random_type(rng, depth - 1, atoms, spine)),
        k => {
            // A left-nested spine of width w is w-1 levels deep before its leaves.
            let width = rng.gen_range(2..=spine.clamp(2, depth));
            let inner = depth - (width - 1);
            let parts: Vec<TypeExpr> = (0..width).map(|_| random_type(rng, inner, atoms, spine)).collect();
            parts.into_iter().reduce(|a, b| if k == 1 { and(a, b) } else { or(a, b) }).unwrap()
        }
    }
}

pub fn shuffle_top<R: Rng>(rng: &mut R, t: &TypeExpr) -> TypeExpr {
    let mut conj: Vec<TypeExpr> = t
        .and_components()
        .iter()
        .map(|c| {
            let mut ds = c.or_components();
            ds.shuffle(rng);
            tyiso::type_core::or_all(&ds)
        })
        .collect();
    conj.shuffle(rng);
    tyiso::type_core::and_all(&conj)
}

/// Proptest strategy for types over the first `atoms` atom names.
pub fn arb_type(atoms: usize, depth: u32) -> impl proptest::strategy::Strategy<Value = TypeExpr> {
    use proptest::prelude::*;
    let leaf = (0..atoms).prop_map(|i| atom(ATOMS[i]));
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| arrow(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| and(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| or(l, r)),
        ]
    })
}
