//! Type expressions over atoms, arrows, intersections and unions.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

/// A type expression. Binary and order preserving; no implicit flattening.
///
/// The derived ordering puts `Atom < Arrow < And < Or` and then compares
/// children lexicographically, which is the total order used by
/// [`CanonicalTop`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Atom(Rc<str>),
    Arrow(Rc<TypeExpr>, Rc<TypeExpr>),
    And(Rc<TypeExpr>, Rc<TypeExpr>),
    Or(Rc<TypeExpr>, Rc<TypeExpr>),
}

pub fn atom(name: &str) -> TypeExpr {
    TypeExpr::Atom(Rc::from(name))
}

pub fn arrow(l: TypeExpr, r: TypeExpr) -> TypeExpr {
    TypeExpr::Arrow(Rc::new(l), Rc::new(r))
}

pub fn and(l: TypeExpr, r: TypeExpr) -> TypeExpr {
    TypeExpr::And(Rc::new(l), Rc::new(r))
}

pub fn or(l: TypeExpr, r: TypeExpr) -> TypeExpr {
    TypeExpr::Or(Rc::new(l), Rc::new(r))
}

/// Left-nested intersection of a non-empty list.
pub fn and_all(items: &[TypeExpr]) -> TypeExpr {
    let mut it = items.iter();
    let first = it.next().expect("and_all of an empty list").clone();
    it.fold(first, |acc, t| and(acc, t.clone()))
}

/// Left-nested union of a non-empty list.
pub fn or_all(items: &[TypeExpr]) -> TypeExpr {
    let mut it = items.iter();
    let first = it.next().expect("or_all of an empty list").clone();
    it.fold(first, |acc, t| or(acc, t.clone()))
}

/// Syntactic stratum, finest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stratum {
    Atomic,
    ArrowType,
    BasicIntersection,
    BasicUnion,
    General,
}

impl TypeExpr {
    /// Atoms and arrows, the types written α.
    pub fn is_alpha(&self) -> bool {
        matches!(self, TypeExpr::Atom(_) | TypeExpr::Arrow(..))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, TypeExpr::Atom(_))
    }

    pub fn size(&self) -> usize {
        match self {
            TypeExpr::Atom(_) => 1,
            TypeExpr::Arrow(l, r) | TypeExpr::And(l, r) | TypeExpr::Or(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TypeExpr::Atom(_) => 1,
            TypeExpr::Arrow(l, r) | TypeExpr::And(l, r) | TypeExpr::Or(l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            TypeExpr::Atom(a) => {
                out.insert(a.to_string());
            }
            TypeExpr::Arrow(l, r) | TypeExpr::And(l, r) | TypeExpr::Or(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Components of the maximal intersection spine rooted here, left to right.
    pub fn and_components(&self) -> Vec<TypeExpr> {
        let mut out = Vec::new();
        fn go(t: &TypeExpr, out: &mut Vec<TypeExpr>) {
            match t {
                TypeExpr::And(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                _ => out.push(t.clone()),
            }
        }
        go(self, &mut out);
        out
    }

    /// Components of the maximal union spine rooted here, left to right.
    pub fn or_components(&self) -> Vec<TypeExpr> {
        let mut out = Vec::new();
        fn go(t: &TypeExpr, out: &mut Vec<TypeExpr>) {
            match t {
                TypeExpr::Or(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                _ => out.push(t.clone()),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn is_basic_intersection(&self) -> bool {
        self.and_components().iter().all(TypeExpr::is_alpha)
    }

    pub fn is_basic_union(&self) -> bool {
        self.or_components().iter().all(TypeExpr::is_alpha)
    }
}

pub fn classify(t: &TypeExpr) -> Stratum {
    match t {
        TypeExpr::Atom(_) => Stratum::Atomic,
        TypeExpr::Arrow(..) => Stratum::ArrowType,
        TypeExpr::And(..) if t.is_basic_intersection() => Stratum::BasicIntersection,
        TypeExpr::Or(..) if t.is_basic_union() => Stratum::BasicUnion,
        _ => Stratum::General,
    }
}

/// Top-level flattened form: a sorted, de-duplicated set of conjuncts, each
/// a sorted, de-duplicated set of disjuncts. Subterms below the two top
/// spines are compared structurally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalTop(pub Vec<Vec<TypeExpr>>);

impl CanonicalTop {
    pub fn of(t: &TypeExpr) -> Self {
        let conj: BTreeSet<Vec<TypeExpr>> = t
            .and_components()
            .iter()
            .map(|c| {
                let ds: BTreeSet<TypeExpr> = c.or_components().into_iter().collect();
                ds.into_iter().collect()
            })
            .collect();
        CanonicalTop(conj.into_iter().collect())
    }
}

pub fn ac_equal_top(a: &TypeExpr, b: &TypeExpr) -> bool {
    CanonicalTop::of(a) == CanonicalTop::of(b)
}

/// Conjuncts of the top-level disjunctive form, as a list of disjuncts.
///
/// `w(α) = α`, `w(A ∨ B) = w(A) ++ w(B)`, and `w(A ∧ B)` pairs every
/// disjunct of `w(A)` with every disjunct of `w(B)` in a binary `∧`.
pub fn dnf_disjuncts(t: &TypeExpr) -> Vec<TypeExpr> {
    match t {
        TypeExpr::Atom(_) | TypeExpr::Arrow(..) => vec![t.clone()],
        TypeExpr::Or(l, r) => {
            let mut v = dnf_disjuncts(l);
            v.extend(dnf_disjuncts(r));
            v
        }
        TypeExpr::And(l, r) => {
            let ls = dnf_disjuncts(l);
            let rs = dnf_disjuncts(r);
            let mut v = Vec::with_capacity(ls.len() * rs.len());
            for a in &ls {
                for b in &rs {
                    v.push(and(a.clone(), b.clone()));
                }
            }
            v
        }
    }
}

/// `w`: distributes `∧` over `∨` at top level only.
pub fn top_dnf(t: &TypeExpr) -> TypeExpr {
    or_all(&dnf_disjuncts(t))
}

/// Conjuncts of the top-level conjunctive form.
///
/// Arrows are split using the disjuncts of `w` on the left and the
/// conjuncts of `cw` on the right, giving `⋀_l ⋀_k (μ_k → ι_l)`.
pub fn cnf_conjuncts(t: &TypeExpr) -> Vec<TypeExpr> {
    match t {
        TypeExpr::Atom(_) => vec![t.clone()],
        TypeExpr::And(l, r) => {
            let mut v = cnf_conjuncts(l);
            v.extend(cnf_conjuncts(r));
            v
        }
        TypeExpr::Or(l, r) => {
            let ls = cnf_conjuncts(l);
            let rs = cnf_conjuncts(r);
            let mut v = Vec::with_capacity(ls.len() * rs.len());
            for a in &ls {
                for b in &rs {
                    v.push(or(a.clone(), b.clone()));
                }
            }
            v
        }
        TypeExpr::Arrow(l, r) => {
            let mus = dnf_disjuncts(l);
            let iotas = cnf_conjuncts(r);
            let mut v = Vec::with_capacity(mus.len() * iotas.len());
            for iota in &iotas {
                for mu in &mus {
                    v.push(arrow(mu.clone(), iota.clone()));
                }
            }
            v
        }
    }
}

/// `cw`: the top-level conjunctive form.
pub fn top_cnf(t: &TypeExpr) -> TypeExpr {
    and_all(&cnf_conjuncts(t))
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_type(self))
    }
}

impl fmt::Debug for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", crate::syntax::print_type(self))
    }
}
