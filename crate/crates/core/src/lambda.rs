//! Linear λ-terms, βη-normalisation and finite hereditary permutations.
//!
//! Terms are stored with names so that typing environments can refer to
//! free variables; equality is α-equivalence. Normalisation runs on a
//! de Bruijn representation and reads back with a canonical naming scheme:
//! the outermost binder is `x`, a binder at depth `d` is `y{d}`.

use crate::paths::{prefix_all, project, DPath, Dir, PathSet, SPath};
use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;
use thiserror::Error;

#[derive(Clone)]
pub enum Term {
    Var(Rc<str>),
    Abs(Rc<str>, Rc<Term>),
    App(Rc<Term>, Rc<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("term is not a finite hereditary permutation: {0}")]
    NotFhp(String),
    #[error("term is not a finite hereditary identity: {0}")]
    NotFhi(String),
    #[error("normalisation exceeded the budget of {0} β-steps")]
    BudgetExceeded(usize),
}

pub const DEFAULT_BETA_BUDGET: usize = 100_000;

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(Rc::from(x))
    }

    pub fn abs(x: &str, body: Term) -> Term {
        Term::Abs(Rc::from(x), Rc::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Rc::new(f), Rc::new(a))
    }

    pub fn identity() -> Term {
        Term::abs("x", Term::var("x"))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(t: &Term, bound: &mut Vec<Rc<str>>, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(x) => {
                    if !bound.iter().any(|b| b == x) {
                        out.insert(x.to_string());
                    }
                }
                Term::Abs(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Term::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every name occurring in the term, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.to_string());
            }
            Term::Abs(x, b) => {
                out.insert(x.to_string());
                b.collect_vars(out);
            }
            Term::App(f, a) => {
                f.collect_vars(out);
                a.collect_vars(out);
            }
        }
    }

    /// Number of free occurrences of `x`.
    pub fn occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(&**y == x),
            Term::Abs(y, b) => {
                if &**y == x {
                    0
                } else {
                    b.occurrences(x)
                }
            }
            Term::App(f, a) => f.occurrences(x) + a.occurrences(x),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        alpha_eq(self, other)
    }
}

impl Eq for Term {}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", crate::syntax::print_term(self))
    }
}

pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go<'a>(a: &'a Term, b: &'a Term, ea: &mut Vec<&'a str>, eb: &mut Vec<&'a str>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let ix = ea.iter().rposition(|n| *n == &**x);
                let iy = eb.iter().rposition(|n| *n == &**y);
                match (ix, iy) {
                    (Some(i), Some(j)) => ea.len() - i == eb.len() - j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Abs(x, p), Term::Abs(y, q)) => {
                ea.push(x);
                eb.push(y);
                let r = go(p, q, ea, eb);
                ea.pop();
                eb.pop();
                r
            }
            (Term::App(f, a1), Term::App(g, b1)) => go(f, g, ea, eb) && go(a1, b1, ea, eb),
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// A name based on `base` that is not in `avoid`.
pub fn fresh(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() { "v" } else { stem };
    (0..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}

/// Capture-avoiding substitution `m[n/x]`.
pub fn subst(m: &Term, x: &str, n: &Term) -> Term {
    let fv_n = n.free_vars();
    fn go(m: &Term, x: &str, n: &Term, fv_n: &BTreeSet<String>) -> Term {
        match m {
            Term::Var(y) => {
                if &**y == x {
                    n.clone()
                } else {
                    m.clone()
                }
            }
            Term::App(f, a) => Term::app(go(f, x, n, fv_n), go(a, x, n, fv_n)),
            Term::Abs(y, b) => {
                if &**y == x || b.occurrences(x) == 0 {
                    m.clone()
                } else if fv_n.contains(&**y) {
                    let mut avoid = fv_n.clone();
                    b.collect_vars(&mut avoid);
                    avoid.insert(x.to_string());
                    let y2 = fresh(y, &avoid);
                    let b2 = go(b, y, &Term::var(&y2), &BTreeSet::new());
                    Term::abs(&y2, go(&b2, x, n, fv_n))
                } else {
                    Term::abs(y, go(b, x, n, fv_n))
                }
            }
        }
    }
    go(m, x, n, &fv_n)
}

/// Renames the free variable `x` to `y`, which must not occur in `m`.
pub fn rename_free(m: &Term, x: &str, y: &str) -> Term {
    subst(m, x, &Term::var(y))
}

/// Every bound variable occurs exactly once in its scope and every free
/// variable occurs exactly once.
pub fn is_linear(t: &Term) -> bool {
    fn go(t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::Abs(x, b) => b.occurrences(x) == 1 && go(b),
            Term::App(f, a) => go(f) && go(a),
        }
    }
    go(t) && t.free_vars().iter().all(|x| t.occurrences(x) == 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Db {
    Free(Rc<str>),
    Bound(usize),
    Abs(Rc<Db>),
    App(Rc<Db>, Rc<Db>),
}

fn to_db(t: &Term) -> Db {
    fn go(t: &Term, env: &mut Vec<Rc<str>>) -> Db {
        match t {
            Term::Var(x) => match env.iter().rposition(|n| n == x) {
                Some(i) => Db::Bound(env.len() - 1 - i),
                None => Db::Free(x.clone()),
            },
            Term::Abs(x, b) => {
                env.push(x.clone());
                let r = Db::Abs(Rc::new(go(b, env)));
                env.pop();
                r
            }
            Term::App(f, a) => Db::App(Rc::new(go(f, env)), Rc::new(go(a, env))),
        }
    }
    go(t, &mut Vec::new())
}

fn from_db(t: &Db, avoid: &BTreeSet<String>) -> Term {
    fn binder(depth: usize, avoid: &BTreeSet<String>) -> String {
        let base = if depth == 0 { "x".to_string() } else { format!("y{depth}") };
        let mut name = base;
        while avoid.contains(&name) {
            name.push('\'');
        }
        name
    }
    fn go(t: &Db, names: &mut Vec<String>, avoid: &BTreeSet<String>) -> Term {
        match t {
            Db::Free(x) => Term::Var(x.clone()),
            Db::Bound(i) => Term::var(&names[names.len() - 1 - i]),
            Db::Abs(b) => {
                let n = binder(names.len(), avoid);
                names.push(n.clone());
                let body = go(b, names, avoid);
                names.pop();
                Term::abs(&n, body)
            }
            Db::App(f, a) => Term::app(go(f, names, avoid), go(a, names, avoid)),
        }
    }
    go(t, &mut Vec::new(), avoid)
}

fn shift(t: &Db, d: isize, cutoff: usize) -> Db {
    match t {
        Db::Free(_) => t.clone(),
        Db::Bound(i) => {
            if *i >= cutoff {
                Db::Bound((*i as isize + d) as usize)
            } else {
                t.clone()
            }
        }
        Db::Abs(b) => Db::Abs(Rc::new(shift(b, d, cutoff + 1))),
        Db::App(f, a) => Db::App(Rc::new(shift(f, d, cutoff)), Rc::new(shift(a, d, cutoff))),
    }
}

fn db_subst(t: &Db, j: usize, s: &Db) -> Db {
    match t {
        Db::Free(_) => t.clone(),
        Db::Bound(i) => {
            if *i == j {
                shift(s, j as isize, 0)
            } else if *i > j {
                Db::Bound(i - 1)
            } else {
                t.clone()
            }
        }
        Db::Abs(b) => Db::Abs(Rc::new(db_subst(b, j + 1, s))),
        Db::App(f, a) => Db::App(Rc::new(db_subst(f, j, s)), Rc::new(db_subst(a, j, s))),
    }
}

fn beta(body: &Db, arg: &Db) -> Db {
    db_subst(body, 0, arg)
}

fn db_nf(t: &Db, fuel: &mut usize, budget: usize) -> Result<Db, LambdaError> {
    match t {
        Db::Free(_) | Db::Bound(_) => Ok(t.clone()),
        Db::Abs(b) => Ok(Db::Abs(Rc::new(db_nf(b, fuel, budget)?))),
        Db::App(f, a) => {
            let f = db_whnf(f, fuel, budget)?;
            if let Db::Abs(b) = &f {
                tick(fuel, budget)?;
                db_nf(&beta(b, a), fuel, budget)
            } else {
                Ok(Db::App(Rc::new(db_nf(&f, fuel, budget)?), Rc::new(db_nf(a, fuel, budget)?)))
            }
        }
    }
}

fn db_whnf(t: &Db, fuel: &mut usize, budget: usize) -> Result<Db, LambdaError> {
    match t {
        Db::App(f, a) => {
            let f = db_whnf(f, fuel, budget)?;
            if let Db::Abs(b) = &f {
                tick(fuel, budget)?;
                db_whnf(&beta(b, a), fuel, budget)
            } else {
                Ok(Db::App(Rc::new(f), a.clone()))
            }
        }
        _ => Ok(t.clone()),
    }
}

fn tick(fuel: &mut usize, budget: usize) -> Result<(), LambdaError> {
    if *fuel == 0 {
        return Err(LambdaError::BudgetExceeded(budget));
    }
    *fuel -= 1;
    Ok(())
}

fn occurs(t: &Db, j: usize) -> bool {
    match t {
        Db::Free(_) => false,
        Db::Bound(i) => *i == j,
        Db::Abs(b) => occurs(b, j + 1),
        Db::App(f, a) => occurs(f, j) || occurs(a, j),
    }
}

fn eta(t: &Db) -> Db {
    match t {
        Db::Free(_) | Db::Bound(_) => t.clone(),
        Db::App(f, a) => Db::App(Rc::new(eta(f)), Rc::new(eta(a))),
        Db::Abs(b) => {
            let b = eta(b);
            if let Db::App(f, a) = &b {
                if **a == Db::Bound(0) && !occurs(f, 0) {
                    return shift(f, -1, 0);
                }
            }
            Db::Abs(Rc::new(b))
        }
    }
}

pub fn beta_nf(t: &Term, budget: usize) -> Result<Term, LambdaError> {
    let mut fuel = budget;
    let nf = db_nf(&to_db(t), &mut fuel, budget)?;
    Ok(from_db(&nf, &t.free_vars()))
}

pub fn beta_eta_nf(t: &Term, budget: usize) -> Result<Term, LambdaError> {
    let mut fuel = budget;
    let nf = db_nf(&to_db(t), &mut fuel, budget)?;
    Ok(from_db(&eta(&nf), &t.free_vars()))
}

/// Shape of a finite hereditary permutation
/// `λx y1…yn. x (P1 y_π(1)) … (Pn y_π(n))`.
///
/// `perm[i]` is `π(i+1) - 1`, so the identity permutation is `[0, 1, …]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FhpShape {
    pub arity: usize,
    pub perm: Vec<usize>,
    pub subs: Vec<FhpShape>,
}

impl FhpShape {
    pub fn identity() -> Self {
        FhpShape { arity: 0, perm: Vec::new(), subs: Vec::new() }
    }

    pub fn is_identity_everywhere(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, p)| i == *p) && self.subs.iter().all(Self::is_identity_everywhere)
    }

    pub fn depth(&self) -> usize {
        if self.arity == 0 {
            0
        } else {
            1 + self.subs.iter().map(Self::depth).max().unwrap_or(0)
        }
    }
}

impl fmt::Display for FhpShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arity == 0 {
            return f.write_str("id");
        }
        let perm: Vec<String> = self.perm.iter().map(|p| (p + 1).to_string()).collect();
        write!(f, "({})", perm.join(" "))?;
        if self.subs.iter().any(|s| s.arity > 0) {
            let subs: Vec<String> = self.subs.iter().map(|s| s.to_string()).collect();
            write!(f, "[{}]", subs.join(", "))?;
        }
        Ok(())
    }
}

/// The β-normal term of a shape.
pub fn fhp_term(shape: &FhpShape) -> Term {
    let mut counter = 0usize;
    let x = next_name(&mut counter);
    Term::abs(&x, fhp_apply(shape, &x, &mut counter))
}

fn next_name(counter: &mut usize) -> String {
    let n = if *counter == 0 { "x".to_string() } else { format!("y{counter}") };
    *counter += 1;
    n
}

/// The β-normal form of `P h` for the shape `P` and a variable `h`.
fn fhp_apply(shape: &FhpShape, head: &str, counter: &mut usize) -> Term {
    let ys: Vec<String> = (0..shape.arity).map(|_| next_name(counter)).collect();
    let mut body = Term::var(head);
    for i in 0..shape.arity {
        let arg = fhp_apply(&shape.subs[i], &ys[shape.perm[i]], counter);
        body = Term::app(body, arg);
    }
    ys.iter().rev().fold(body, |b, y| Term::abs(y, b))
}

/// Recognises a finite hereditary permutation after β-normalisation.
pub fn recognize_fhp(t: &Term) -> Result<FhpShape, LambdaError> {
    let nf = beta_nf(t, DEFAULT_BETA_BUDGET)?;
    recognize_normal(&nf)
}

/// Recognises a β-normal term as a finite hereditary permutation, without
/// normalising first.
pub fn recognize_normal(t: &Term) -> Result<FhpShape, LambdaError> {
    let not = || LambdaError::NotFhp(t.to_string());
    if !t.free_vars().is_empty() {
        return Err(not());
    }
    match t {
        Term::Abs(x, body) => recognize_open(body, x).ok_or_else(not),
        _ => Err(not()),
    }
}

/// Recognises `body` as the β-normal form of `P head`.
pub fn recognize_open(body: &Term, head: &str) -> Option<FhpShape> {
    let mut binders: Vec<Rc<str>> = Vec::new();
    let mut cur = body;
    while let Term::Abs(y, b) = cur {
        binders.push(y.clone());
        cur = b;
    }
    let mut args = Vec::new();
    while let Term::App(f, a) = cur {
        args.push(a.clone());
        cur = f;
    }
    args.reverse();
    match cur {
        Term::Var(h) if &**h == head => {}
        _ => return None,
    }
    if args.len() != binders.len() {
        return None;
    }
    let distinct: BTreeSet<&str> = binders.iter().map(|b| &**b).collect();
    if distinct.len() != binders.len() || distinct.contains(head) {
        return None;
    }
    let mut perm = Vec::with_capacity(args.len());
    let mut subs = Vec::with_capacity(args.len());
    let mut used = vec![false; binders.len()];
    for a in &args {
        let fv = a.free_vars();
        if fv.len() != 1 {
            return None;
        }
        let v = fv.into_iter().next().unwrap();
        let j = binders.iter().position(|b| **b == *v)?;
        if used[j] || a.occurrences(&v) != 1 {
            return None;
        }
        used[j] = true;
        perm.push(j);
        subs.push(recognize_open(a, &v)?);
    }
    Some(FhpShape { arity: binders.len(), perm, subs })
}

pub fn fhp_inverse(shape: &FhpShape) -> FhpShape {
    let n = shape.arity;
    let mut inv = vec![0; n];
    for (i, &p) in shape.perm.iter().enumerate() {
        inv[p] = i;
    }
    let subs = (0..n).map(|j| fhp_inverse(&shape.subs[inv[j]])).collect();
    FhpShape { arity: n, perm: inv, subs }
}

/// The shape of the β-normal form of `λx. p (q x)`.
pub fn fhp_compose(p: &FhpShape, q: &FhpShape) -> Result<FhpShape, LambdaError> {
    recognize_fhp(&compose_terms(&fhp_term(p), &fhp_term(q)))
}

/// `λx. p (q x)` for closed terms, without normalising.
pub fn compose_terms(p: &Term, q: &Term) -> Term {
    let mut avoid = p.all_vars();
    q.collect_vars(&mut avoid);
    let x = fresh("x", &avoid);
    Term::abs(&x, Term::app(p.clone(), Term::app(q.clone(), Term::var(&x))))
}

/// Argument of [`fhi_of_path`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FhiInput {
    D(DPath),
    S(SPath),
    Set(PathSet),
}

impl FhiInput {
    pub fn path_set(&self) -> PathSet {
        match self {
            FhiInput::D(p) => [p.clone()].into_iter().collect(),
            FhiInput::S(p) => p.as_path_set(),
            FhiInput::Set(s) => s.clone(),
        }
    }
}

/// Shape of the finite hereditary identity `Id_P`.
pub fn fhi_shape(p: &PathSet) -> FhpShape {
    if p.iter().all(DPath::is_empty) {
        return FhpShape::identity();
    }
    let l = fhi_shape(&project(p, Dir::L));
    let r = fhi_shape(&project(p, Dir::R));
    let arity = r.arity + 1;
    let mut subs = vec![l];
    subs.extend(r.subs);
    FhpShape { arity, perm: (0..arity).collect(), subs }
}

pub fn fhi_of_path(input: &FhiInput) -> Term {
    fhp_term(&fhi_shape(&input.path_set()))
}

pub fn fhi_of_set(p: &PathSet) -> Term {
    fhp_term(&fhi_shape(p))
}

/// The direction paths `#(Id)` of a finite hereditary identity.
pub fn dpaths_of_fhi(t: &Term) -> Result<PathSet, LambdaError> {
    let shape = recognize_fhp(t).map_err(|_| LambdaError::NotFhi(t.to_string()))?;
    if !shape.is_identity_everywhere() {
        return Err(LambdaError::NotFhi(t.to_string()));
    }
    Ok(shape_paths(&shape))
}

fn shape_paths(s: &FhpShape) -> PathSet {
    if s.arity == 0 {
        return [DPath::empty()].into_iter().collect();
    }
    let rest = FhpShape { arity: s.arity - 1, perm: (0..s.arity - 1).collect(), subs: s.subs[1..].to_vec() };
    let mut out = prefix_all(Dir::L, &shape_paths(&s.subs[0]));
    out.extend(prefix_all(Dir::R, &shape_paths(&rest)));
    out
}
