//! Reference implementations written independently of the library, used to
//! cross-check it.

use std::collections::BTreeSet;
use tyiso::lambda::Term;
use tyiso::type_core::TypeExpr;

/// De Bruijn terms; free variables keep their names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Db {
    Bound(usize),
    Free(String),
    Lam(Box<Db>),
    App(Box<Db>, Box<Db>),
}

pub fn to_db(t: &Term) -> Db {
    fn go(t: &Term, scope: &mut Vec<String>) -> Db {
        match t {
            Term::Var(x) => match scope.iter().rev().position(|y| **y == **x) {
                Some(i) => Db::Bound(i),
                None => Db::Free(x.to_string()),
            },
            Term::Abs(x, b) => {
                scope.push(x.to_string());
                let body = go(b, scope);
                scope.pop();
                Db::Lam(Box::new(body))
            }
            Term::App(f, a) => Db::App(Box::new(go(f, scope)), Box::new(go(a, scope))),
        }
    }
    go(t, &mut Vec::new())
}

fn shift(t: &Db, by: isize, cutoff: usize) -> Db {
    match t {
        Db::Bound(i) if *i >= cutoff => Db::Bound((*i as isize + by) as usize),
        Db::Bound(_) | Db::Free(_) => t.clone(),
        Db::Lam(b) => Db::Lam(Box::new(shift(b, by, cutoff + 1))),
        Db::App(f, a) => Db::App(Box::new(shift(f, by, cutoff)), Box::new(shift(a, by, cutoff))),
    }
}

fn subst(t: &Db, k: usize, s: &Db) -> Db {
    match t {
        Db::Bound(i) if *i == k => shift(s, k as isize, 0),
        Db::Bound(i) if *i > k => Db::Bound(i - 1),
        Db::Bound(_) | Db::Free(_) => t.clone(),
        Db::Lam(b) => Db::Lam(Box::new(subst(b, k + 1, s))),
        Db::App(f, a) => Db::App(Box::new(subst(f, k, s)), Box::new(subst(a, k, s))),
    }
}

fn occurs(t: &Db, k: usize) -> bool {
    match t {
        Db::Bound(i) => *i == k,
        Db::Free(_) => false,
        Db::Lam(b) => occurs(b, k + 1),
        Db::App(f, a) => occurs(f, k) || occurs(a, k),
    }
}

fn step(t: &Db) -> Option<Db> {
    match t {
        Db::App(f, a) => {
            if let Db::Lam(b) = &**f {
                return Some(subst(b, 0, a));
            }
            if let Some(f2) = step(f) {
                return Some(Db::App(Box::new(f2), a.clone()));
            }
            step(a).map(|a2| Db::App(f.clone(), Box::new(a2)))
        }
        Db::Lam(b) => {
            if let Db::App(f, a) = &**b {
                if **a == Db::Bound(0) && !occurs(f, 0) {
                    return Some(shift(f, -1, 0));
                }
            }
            step(b).map(|b2| Db::Lam(Box::new(b2)))
        }
        _ => None,
    }
}

/// βη-normal form by leftmost reduction, or `None` past `budget` steps.
pub fn beta_eta(t: &Db, budget: usize) -> Option<Db> {
    let mut cur = t.clone();
    for _ in 0..budget {
        match step(&cur) {
            Some(n) => cur = n,
            None => return Some(cur),
        }
    }
    None
}

pub fn is_identity(t: &Term) -> bool {
    beta_eta(&to_db(t), 100_000) == Some(Db::Lam(Box::new(Db::Bound(0))))
}

/// Whether `x:s ⊢ x:t` is derivable, by searching for a valuation of the
/// atoms and arrows of `s` and `t` that makes `s` true and `t` false.
pub fn entails(s: &TypeExpr, t: &TypeExpr) -> bool {
    fn leaves(t: &TypeExpr, out: &mut BTreeSet<TypeExpr>) {
        match t {
            TypeExpr::And(l, r) | TypeExpr::Or(l, r) => {
                leaves(l, out);
                leaves(r, out);
            }
            _ => {
                out.insert(t.clone());
            }
        }
    }
    fn eval(t: &TypeExpr, truth: &[TypeExpr]) -> bool {
        match t {
            TypeExpr::And(l, r) => eval(l, truth) && eval(r, truth),
            TypeExpr::Or(l, r) => eval(l, truth) || eval(r, truth),
            _ => truth.contains(t),
        }
    }
    let mut ls = BTreeSet::new();
    leaves(s, &mut ls);
    leaves(t, &mut ls);
    let ls: Vec<TypeExpr> = ls.into_iter().collect();
    (0u32..1 << ls.len()).all(|mask| {
        let truth: Vec<TypeExpr> = ls.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| l.clone()).collect();
        !eval(s, &truth) || eval(t, &truth)
    })
}

/// Conjunct count and sorted disjunct widths, read straight off the tree.
pub fn profile(t: &TypeExpr) -> (usize, Vec<usize>) {
    fn spine(t: &TypeExpr, and: bool, out: &mut Vec<TypeExpr>) {
        match (t, and) {
            (TypeExpr::And(l, r), true) | (TypeExpr::Or(l, r), false) => {
                spine(l, and, out);
                spine(r, and, out);
            }
            _ => out.push(t.clone()),
        }
    }
    let mut conj = Vec::new();
    spine(t, true, &mut conj);
    let mut widths: Vec<usize> = conj
        .iter()
        .map(|c| {
            let mut d = Vec::new();
            spine(c, false, &mut d);
            d.len()
        })
        .collect();
    widths.sort_unstable();
    (conj.len(), widths)
}
