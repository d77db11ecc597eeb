//! Direction paths, box-terminated paths, agreement and one-hole contexts.

use crate::type_core::{self, TypeExpr};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    L,
    R,
}

/// A word over `{L, R}`; the empty word is ε.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DPath(pub Vec<Dir>);

/// A direction path followed by the box `□`, printed with a trailing `#`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SPath(pub DPath);

pub type PathSet = BTreeSet<DPath>;

impl DPath {
    pub fn empty() -> Self {
        DPath(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn cons(d: Dir, p: &DPath) -> DPath {
        let mut v = Vec::with_capacity(p.0.len() + 1);
        v.push(d);
        v.extend_from_slice(&p.0);
        DPath(v)
    }

    pub fn concat(&self, other: &DPath) -> DPath {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        DPath(v)
    }

    pub fn last(&self) -> Option<Dir> {
        self.0.last().copied()
    }
}

impl fmt::Display for DPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for d in &self.0 {
            f.write_str(match d {
                Dir::L => "L",
                Dir::R => "R",
            })?;
        }
        Ok(())
    }
}

impl fmt::Display for SPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.0.is_empty() {
            write!(f, "{}", self.0)?;
        }
        f.write_str("#")
    }
}

impl SPath {
    /// The direction path obtained by dropping the box.
    pub fn dpath(&self) -> &DPath {
        &self.0
    }

    /// The two direction paths `pL` and `pR` that describe the same identity.
    pub fn as_path_set(&self) -> PathSet {
        let mut l = self.0.clone();
        l.0.push(Dir::L);
        let mut r = self.0.clone();
        r.0.push(Dir::R);
        [l, r].into_iter().collect()
    }
}

pub fn format_path_set(p: &PathSet) -> String {
    let items: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Whether `t` agrees with the direction path `p`.
pub fn agrees(t: &TypeExpr, p: &DPath) -> bool {
    agrees_at(t, &p.0)
}

fn agrees_at(t: &TypeExpr, p: &[Dir]) -> bool {
    if p.is_empty() {
        return true;
    }
    match t {
        TypeExpr::Atom(_) => false,
        TypeExpr::Arrow(l, r) => match p[0] {
            Dir::L => agrees_at(l, &p[1..]),
            Dir::R => agrees_at(r, &p[1..]),
        },
        TypeExpr::And(l, r) | TypeExpr::Or(l, r) => agrees_at(l, p) && agrees_at(r, p),
    }
}

/// Whether `t` agrees with the box-terminated path `p`.
pub fn agrees_s(t: &TypeExpr, p: &SPath) -> bool {
    agrees_box(t, &p.0 .0)
}

fn agrees_box(t: &TypeExpr, p: &[Dir]) -> bool {
    match t {
        TypeExpr::Atom(_) => false,
        TypeExpr::Arrow(l, r) => match p.first() {
            None => true,
            Some(Dir::L) => agrees_box(l, &p[1..]),
            Some(Dir::R) => agrees_box(r, &p[1..]),
        },
        TypeExpr::And(l, r) | TypeExpr::Or(l, r) => agrees_box(l, p) && agrees_box(r, p),
    }
}

pub fn agrees_set(t: &TypeExpr, ps: &PathSet) -> bool {
    ps.iter().all(|p| agrees(t, p))
}

/// `p · P = {p p' | p' ∈ P} ∪ {p}`.
pub fn concat_prefix(p: &DPath, ps: &PathSet) -> PathSet {
    let mut out: PathSet = ps.iter().map(|q| p.concat(q)).collect();
    out.insert(p.clone());
    out
}

/// `d · P` without adding `d` itself.
pub fn prefix_all(d: Dir, ps: &PathSet) -> PathSet {
    ps.iter().map(|q| DPath::cons(d, q)).collect()
}

/// `{p | d p ∈ P}`.
pub fn project(ps: &PathSet, d: Dir) -> PathSet {
    ps.iter()
        .filter(|q| q.0.first() == Some(&d))
        .map(|q| DPath(q.0[1..].to_vec()))
        .collect()
}

/// One step of a context, from the enclosing node towards the hole.
/// The payload is the sibling that stays in place.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    /// The hole is the left-hand side of an arrow with the given right-hand side.
    ArrowLhs(TypeExpr),
    /// The hole is the right-hand side of an arrow with the given left-hand side.
    ArrowRhs(TypeExpr),
    AndLeft(TypeExpr),
    AndRight(TypeExpr),
    OrLeft(TypeExpr),
    OrRight(TypeExpr),
}

impl Frame {
    pub fn wrap(&self, inner: TypeExpr) -> TypeExpr {
        match self {
            Frame::ArrowLhs(r) => type_core::arrow(inner, r.clone()),
            Frame::ArrowRhs(l) => type_core::arrow(l.clone(), inner),
            Frame::AndLeft(r) => type_core::and(inner, r.clone()),
            Frame::AndRight(l) => type_core::and(l.clone(), inner),
            Frame::OrLeft(r) => type_core::or(inner, r.clone()),
            Frame::OrRight(l) => type_core::or(l.clone(), inner),
        }
    }

    /// The sibling of an intersection or union frame.
    pub fn sibling(&self) -> Option<&TypeExpr> {
        match self {
            Frame::AndLeft(s) | Frame::AndRight(s) | Frame::OrLeft(s) | Frame::OrRight(s) => Some(s),
            _ => None,
        }
    }
}

/// A one-hole context; `frames[0]` is the outermost frame.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TypeContext {
    pub frames: Vec<Frame>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    D,
    S,
}

impl TypeContext {
    pub fn hole() -> Self {
        TypeContext { frames: Vec::new() }
    }

    pub fn is_hole(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn plug(&self, filler: &TypeExpr) -> TypeExpr {
        self.frames.iter().rev().fold(filler.clone(), |acc, f| f.wrap(acc))
    }

    pub fn push(&self, f: Frame) -> TypeContext {
        let mut frames = self.frames.clone();
        frames.push(f);
        TypeContext { frames }
    }

    /// Context of the unique atom called `name` inside `t`.
    pub fn from_marked(t: &TypeExpr, name: &str) -> Option<TypeContext> {
        fn go(t: &TypeExpr, name: &str, acc: &mut Vec<Frame>) -> bool {
            match t {
                TypeExpr::Atom(a) => &**a == name,
                TypeExpr::Arrow(l, r) => {
                    acc.push(Frame::ArrowLhs((**r).clone()));
                    if go(l, name, acc) {
                        return true;
                    }
                    acc.pop();
                    acc.push(Frame::ArrowRhs((**l).clone()));
                    if go(r, name, acc) {
                        return true;
                    }
                    acc.pop();
                    false
                }
                TypeExpr::And(l, r) | TypeExpr::Or(l, r) => {
                    let is_and = matches!(t, TypeExpr::And(..));
                    acc.push(if is_and { Frame::AndLeft((**r).clone()) } else { Frame::OrLeft((**r).clone()) });
                    if go(l, name, acc) {
                        return true;
                    }
                    acc.pop();
                    acc.push(if is_and { Frame::AndRight((**l).clone()) } else { Frame::OrRight((**l).clone()) });
                    if go(r, name, acc) {
                        return true;
                    }
                    acc.pop();
                    false
                }
            }
        }
        let mut frames = Vec::new();
        go(t, name, &mut frames).then_some(TypeContext { frames })
    }

    /// The direction path of the hole, if every sibling along the way agrees.
    pub fn dpath(&self) -> Option<DPath> {
        let mut p: Vec<Dir> = Vec::new();
        for f in self.frames.iter().rev() {
            match f {
                Frame::ArrowLhs(_) => p.insert(0, Dir::L),
                Frame::ArrowRhs(_) => p.insert(0, Dir::R),
                _ => {
                    if !agrees_at(f.sibling().unwrap(), &p) {
                        return None;
                    }
                }
            }
        }
        Some(DPath(p))
    }

    /// The box-terminated path of the hole, if every sibling along the way agrees.
    pub fn spath(&self) -> Option<SPath> {
        let mut p: Vec<Dir> = Vec::new();
        for f in self.frames.iter().rev() {
            match f {
                Frame::ArrowLhs(_) => p.insert(0, Dir::L),
                Frame::ArrowRhs(_) => p.insert(0, Dir::R),
                _ => {
                    if !agrees_box(f.sibling().unwrap(), &p) {
                        return None;
                    }
                }
            }
        }
        Some(SPath(DPath(p)))
    }
}

/// The path of a context of either kind, rendered as a string; `None` when undefined.
pub fn path_of_context(c: &TypeContext, kind: PathKind) -> Option<String> {
    match kind {
        PathKind::D => c.dpath().map(|p| p.to_string()),
        PathKind::S => c.spath().map(|p| p.to_string()),
    }
}

/// Every subterm of `t` with its context, in pre-order.
pub fn subterms(t: &TypeExpr) -> Vec<(TypeContext, TypeExpr)> {
    fn go(t: &TypeExpr, ctx: &TypeContext, out: &mut Vec<(TypeContext, TypeExpr)>) {
        out.push((ctx.clone(), t.clone()));
        match t {
            TypeExpr::Atom(_) => {}
            TypeExpr::Arrow(l, r) => {
                go(l, &ctx.push(Frame::ArrowLhs((**r).clone())), out);
                go(r, &ctx.push(Frame::ArrowRhs((**l).clone())), out);
            }
            TypeExpr::And(l, r) => {
                go(l, &ctx.push(Frame::AndLeft((**r).clone())), out);
                go(r, &ctx.push(Frame::AndRight((**l).clone())), out);
            }
            TypeExpr::Or(l, r) => {
                go(l, &ctx.push(Frame::OrLeft((**r).clone())), out);
                go(r, &ctx.push(Frame::OrRight((**l).clone())), out);
            }
        }
    }
    let mut out = Vec::new();
    go(t, &TypeContext::hole(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_context, parse_dpath, parse_type};

    #[test]
    fn agreement_examples() {
        let t = parse_type("p -> q -> c").unwrap();
        let set: PathSet = [DPath::empty(), parse_dpath("RL").unwrap()].into_iter().collect();
        assert!(agrees_set(&t, &set));
        assert!(!agrees(&parse_type("a").unwrap(), &parse_dpath("L").unwrap()));
        assert!(agrees_set(&parse_type("a").unwrap(), &PathSet::new()));
    }

    #[test]
    fn context_paths() {
        let c = parse_context("s1 -> [] & (s2 -> t1 | t2) -> t2").unwrap();
        assert_eq!(path_of_context(&c, PathKind::D).as_deref(), Some("RL"));
        let c = parse_context("s1 -> ([] & s2 -> t1) | p -> t2").unwrap();
        assert_eq!(path_of_context(&c, PathKind::S), None);
        assert_eq!(path_of_context(&TypeContext::hole(), PathKind::S).as_deref(), Some("#"));
    }

    #[test]
    fn prefixing() {
        let p = parse_dpath("R").unwrap();
        let set: PathSet = [parse_dpath("L").unwrap()].into_iter().collect();
        let got: Vec<String> = concat_prefix(&p, &set).iter().map(|x| x.to_string()).collect();
        assert_eq!(got, vec!["R", "RL"]);
    }
}
