//! Finite hereditary identities with typing derivations: one pair per
//! rewrite step, composed along traces, plus the basic isomorphism laws.
//!
//! Open derivations keep a single free variable (`x` at the outermost
//! level) and mint binders `y1, y2, …` from a counter, so substitution
//! never captures.

use crate::derive::{
    and_el, and_er, and_i, arrow_e, arrow_i, ax, check, derive_var_named, or_e, or_i_prime, or_il, or_ir, rename, subst_c, CheckError,
    DeriveError, TypingDerivation,
};
use crate::lambda::{beta_nf, Term, DEFAULT_BETA_BUDGET};
use crate::paths::{format_path_set, prefix_all, project, DPath, Dir, Frame, PathSet};
use crate::preorder::{LeqProof, LeqRule};
use crate::rewrite::{Redex, RewriteStep, RewriteTrace, RuleId};
use crate::type_core::{self, TypeExpr};
use std::fmt;
use thiserror::Error;

type D = TypingDerivation;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("invalid redex: {0}")]
    InvalidRedex(String),
    #[error("steps {0} and {1} do not chain")]
    BrokenChain(usize, usize),
    #[error("{0}")]
    Derive(#[from] DeriveError),
    #[error("witness does not check: {0}")]
    Check(#[from] CheckError),
    #[error("law {law} expects {expected} component types, got {got}")]
    Arity { law: Law, expected: usize, got: usize },
}

#[derive(Clone, Debug)]
pub struct WitnessPair {
    pub source: TypeExpr,
    pub target: TypeExpr,
    pub forward_term: Term,
    /// `⊢ forward_term : source → target`
    pub forward: TypingDerivation,
    pub backward_term: Term,
    /// `⊢ backward_term : target → source`
    pub backward: TypingDerivation,
}

impl WitnessPair {
    fn new(source: &TypeExpr, target: &TypeExpr, forward: D, backward: D) -> Self {
        WitnessPair {
            source: source.clone(),
            target: target.clone(),
            forward_term: forward.term().clone(),
            forward,
            backward_term: backward.term().clone(),
            backward,
        }
    }

    /// `(λx.x, λx.x)` on `ty`.
    pub fn identity(ty: &TypeExpr) -> Self {
        let d = arrow_i("x", ax("x", ty)).expect("x is bound");
        WitnessPair::new(ty, ty, d.clone(), d)
    }

    /// Both directions by variable judgments, when `x:a ⊢ x:b` and `x:b ⊢ x:a`.
    pub fn by_variables(a: &TypeExpr, b: &TypeExpr) -> Result<Self, WitnessError> {
        let f = arrow_i("x", derive_var_named(a, b, "x")?)?;
        let g = arrow_i("x", derive_var_named(b, a, "x")?)?;
        Ok(WitnessPair::new(a, b, f, g))
    }

    pub fn inverse(&self) -> WitnessPair {
        WitnessPair::new(&self.target, &self.source, self.backward.clone(), self.forward.clone())
    }

    /// Checks both derivations and their conclusions.
    pub fn check(&self) -> Result<(), WitnessError> {
        check(&self.forward)?;
        check(&self.backward)?;
        let fw = type_core::arrow(self.source.clone(), self.target.clone());
        let bw = type_core::arrow(self.target.clone(), self.source.clone());
        if self.forward.ty() != &fw || self.backward.ty() != &bw || !self.forward.env().is_empty() || !self.backward.env().is_empty() {
            return Err(WitnessError::InvalidRedex("witness conclusions do not match the pair".into()));
        }
        Ok(())
    }

    pub fn forward_nf(&self) -> Term {
        beta_nf(&self.forward_term, DEFAULT_BETA_BUDGET).unwrap_or_else(|_| self.forward_term.clone())
    }

    pub fn backward_nf(&self) -> Term {
        beta_nf(&self.backward_term, DEFAULT_BETA_BUDGET).unwrap_or_else(|_| self.backward_term.clone())
    }
}

/// Composes closed witnesses end to end: `λx. Pₙ(…(P₁ x)…)` each way.
/// A single pair is returned unchanged.
pub fn chain(source: &TypeExpr, pairs: &[WitnessPair]) -> Result<WitnessPair, WitnessError> {
    match pairs {
        [] => return Ok(WitnessPair::identity(source)),
        [one] if &one.source == source => return Ok(one.clone()),
        _ => {}
    }
    let mut cur = source.clone();
    for (k, p) in pairs.iter().enumerate() {
        if p.source != cur {
            return Err(WitnessError::BrokenChain(k.saturating_sub(1), k));
        }
        cur = p.target.clone();
    }
    let target = cur;
    let mut f = ax("x", source);
    for p in pairs {
        f = arrow_e(p.forward.clone(), f)?;
    }
    let mut b = ax("x", &target);
    for p in pairs.iter().rev() {
        b = arrow_e(p.backward.clone(), b)?;
    }
    Ok(WitnessPair::new(source, &target, arrow_i("x", f)?, arrow_i("x", b)?))
}

// ---------------------------------------------------------------------------
// Open constructions.

struct Names(usize);

impl Names {
    fn fresh(&mut self) -> String {
        self.0 += 1;
        format!("y{}", self.0)
    }
}

fn trivial(q: &PathSet) -> bool {
    q.iter().all(DPath::is_empty)
}

fn not_agreeing(ty: &TypeExpr, q: &PathSet) -> WitnessError {
    WitnessError::InvalidRedex(format!("{ty} does not agree with {}", format_path_set(q)))
}

/// `v:σ ⊢ Id_Q[v] : σ` for a type agreeing with `Q`.
fn pl_open(nm: &mut Names, ty: &TypeExpr, q: &PathSet, v: &str) -> Result<D, WitnessError> {
    if trivial(q) {
        return Ok(ax(v, ty));
    }
    match ty {
        TypeExpr::Atom(_) => Err(not_agreeing(ty, q)),
        TypeExpr::Arrow(l, r) => {
            let y = nm.fresh();
            let dl = pl_open(nm, l, &project(q, Dir::L), &y)?;
            let app = arrow_e(ax(v, ty), dl)?;
            let u = nm.fresh();
            let dr = pl_open(nm, r, &project(q, Dir::R), &u)?;
            Ok(arrow_i(&y, subst_c(&dr, &u, &app)?)?)
        }
        TypeExpr::And(l, r) => {
            let u = nm.fresh();
            let a = subst_c(&pl_open(nm, l, q, &u)?, &u, &and_el(ax(v, ty))?)?;
            let b = subst_c(&pl_open(nm, r, q, &u)?, &u, &and_er(ax(v, ty))?)?;
            Ok(and_i(a, b)?)
        }
        TypeExpr::Or(l, r) => {
            let a = or_il(pl_open(nm, l, q, v)?, r);
            let b = or_ir(l, pl_open(nm, r, q, v)?);
            Ok(or_i_prime(v, &a, &b)?)
        }
    }
}

/// `v:t ⊢ v : component k of the ∧-spine of t`.
fn pick(t: &TypeExpr, v: &str, k: usize) -> Result<D, WitnessError> {
    let mut d = ax(v, t);
    let mut k = k;
    while let TypeExpr::And(l, _) = d.ty().clone() {
        let n = l.and_components().len();
        if k < n {
            d = and_el(d)?;
        } else {
            k -= n;
            d = and_er(d)?;
        }
    }
    Ok(d)
}

/// `d : component k of the ∨-spine of target` lifted to `target`.
fn embed(d: D, target: &TypeExpr, k: usize) -> D {
    match target {
        TypeExpr::Or(l, r) => {
            let n = l.or_components().len();
            if k < n {
                or_il(embed(d, l, k), r)
            } else {
                or_ir(l, embed(d, r, k - n))
            }
        }
        _ => d,
    }
}

/// Intersection introduction following the ∧-spine of `t`.
fn and_tree(t: &TypeExpr, leaf: &mut dyn FnMut(usize, &TypeExpr) -> Result<D, WitnessError>) -> Result<D, WitnessError> {
    fn go(t: &TypeExpr, k: &mut usize, leaf: &mut dyn FnMut(usize, &TypeExpr) -> Result<D, WitnessError>) -> Result<D, WitnessError> {
        match t {
            TypeExpr::And(l, r) => {
                let a = go(l, k, leaf)?;
                let b = go(r, k, leaf)?;
                Ok(and_i(a, b)?)
            }
            _ => {
                *k += 1;
                leaf(*k - 1, t)
            }
        }
    }
    go(t, &mut 0, leaf)
}

/// Case analysis on `v` following the ∨-spine of `t`.
fn or_cases(t: &TypeExpr, v: &str, leaf: &mut dyn FnMut(usize, &TypeExpr) -> Result<D, WitnessError>) -> Result<D, WitnessError> {
    fn go(t: &TypeExpr, v: &str, k: &mut usize, leaf: &mut dyn FnMut(usize, &TypeExpr) -> Result<D, WitnessError>) -> Result<D, WitnessError> {
        match t {
            TypeExpr::Or(l, r) => {
                let a = go(l, v, k, leaf)?;
                let b = go(r, v, k, leaf)?;
                Ok(or_i_prime(v, &a, &b)?)
            }
            _ => {
                *k += 1;
                leaf(*k - 1, t)
            }
        }
    }
    go(t, v, &mut 0, leaf)
}

/// `v:lhs ⊢ Id_Q[v] : rhs` from a proof of `lhs ≤ rhs`.
fn keye_open(nm: &mut Names, proof: &LeqProof, q: &PathSet, v: &str) -> Result<D, WitnessError> {
    if trivial(q) {
        return Ok(derive_var_named(&proof.lhs, &proof.rhs, v)?);
    }
    match proof.rule {
        LeqRule::MeetArrow => {
            let lc = proof.lhs.and_components();
            let mut leaf = |i: usize, _: &TypeExpr| -> Result<D, WitnessError> {
                let k = proof.pairing.iter().position(|&(_, r)| r == i).ok_or_else(|| WitnessError::InvalidRedex("unpaired component".into()))?;
                let j = proof.pairing[k].0;
                let u = nm.fresh();
                let (pm, pj) = &proof.children[k];
                let piece = arrow_piece(nm, &lc[j], pm, pj, q, &u)?;
                Ok(subst_c(&piece, &u, &pick(&proof.lhs, v, j)?)?)
            };
            and_tree(&proof.rhs, &mut leaf)
        }
        LeqRule::JoinArrow => {
            let mut leaf = |i: usize, comp: &TypeExpr| -> Result<D, WitnessError> {
                let k = proof.pairing.iter().position(|&(l, _)| l == i).ok_or_else(|| WitnessError::InvalidRedex("unpaired component".into()))?;
                let j = proof.pairing[k].1;
                let (pm, pj) = &proof.children[k];
                Ok(embed(arrow_piece(nm, comp, pm, pj, q, v)?, &proof.rhs, j))
            };
            or_cases(&proof.lhs, v, &mut leaf)
        }
        _ => {
            if crate::paths::agrees_set(&proof.rhs, q) {
                let u = nm.fresh();
                let p = pl_open(nm, &proof.rhs, q, &u)?;
                Ok(subst_c(&p, &u, &derive_var_named(&proof.lhs, &proof.rhs, v)?)?)
            } else {
                let u = nm.fresh();
                let p = pl_open(nm, &proof.lhs, q, v)?;
                Ok(subst_c(&derive_var_named(&proof.lhs, &proof.rhs, &u)?, &u, &p)?)
            }
        }
    }
}

/// `u:μ→χ ⊢ λy. Id_R[u Id_L[y]] : ν→κ` from `ν ≤∧ μ` and `χ ≤∨ κ`.
fn arrow_piece(nm: &mut Names, src: &TypeExpr, meet: &LeqProof, join: &LeqProof, q: &PathSet, u: &str) -> Result<D, WitnessError> {
    let y = nm.fresh();
    let dl = keye_open(nm, meet, &project(q, Dir::L), &y)?;
    let app = arrow_e(ax(u, src), dl)?;
    let w = nm.fresh();
    let dr = keye_open(nm, join, &project(q, Dir::R), &w)?;
    Ok(arrow_i(&y, subst_c(&dr, &w, &app)?)?)
}

/// `⊢ Id_P : σ→σ` for a type agreeing with `P`.
pub fn pl_derivation(ty: &TypeExpr, p: &PathSet) -> Result<TypingDerivation, WitnessError> {
    let mut nm = Names(0);
    Ok(arrow_i("x", pl_open(&mut nm, ty, p, "x")?)?)
}

/// `⊢ Id_P : lhs→rhs` from a preorder proof, for `P ⊇ e`.
pub fn keye_derivation(proof: &LeqProof, p: &PathSet) -> Result<TypingDerivation, WitnessError> {
    let mut nm = Names(0);
    Ok(arrow_i("x", keye_open(&mut nm, proof, p, "x")?)?)
}

// ---------------------------------------------------------------------------
// Rewrite steps.

/// Open derivations at the redex: `v:focus ⊢ Id_Q[v] : result` and back.
fn local(nm: &mut Names, r: &Redex, v: &str) -> Result<(D, D, PathSet), WitnessError> {
    let (s, t) = (&r.focus, &r.result);
    let eps: PathSet = [DPath::empty()].into_iter().collect();
    match r.rule {
        RuleId::DistAndOverOr => {
            let (fwd, bwd) = dist_and_over_or(nm, s, t, v)?;
            Ok((fwd, bwd, eps))
        }
        RuleId::DistOrOverAnd => {
            let (fwd, bwd) = dist_or_over_and(nm, s, t, v)?;
            Ok((fwd, bwd, eps))
        }
        RuleId::AcReorder => {
            let meet = matches!(s, TypeExpr::And(..));
            let one_way = |a: &TypeExpr, b: &TypeExpr| -> Result<D, WitnessError> {
                if meet {
                    let ac = a.and_components();
                    and_tree(b, &mut |_, c| pick(a, v, ac.iter().position(|x| x == c).expect("same components")))
                } else {
                    let bc = b.or_components();
                    or_cases(a, v, &mut |_, c| Ok(embed(ax(v, c), b, bc.iter().position(|x| x == c).expect("same components"))))
                }
            };
            Ok((one_way(s, t)?, one_way(t, s)?, eps))
        }
        RuleId::SplitArrowAnd => {
            let TypeExpr::Arrow(sigma, _) = s else { return Err(WitnessError::InvalidRedex("split needs an arrow".into())) };
            let side = |nm: &mut Names, left: bool| -> Result<D, WitnessError> {
                let y = nm.fresh();
                let app = arrow_e(ax(v, s), ax(&y, sigma))?;
                Ok(arrow_i(&y, if left { and_el(app)? } else { and_er(app)? })?)
            };
            let fwd = and_i(side(nm, true)?, side(nm, false)?)?;
            let y = nm.fresh();
            let a = arrow_e(and_el(ax(v, t))?, ax(&y, sigma))?;
            let b = arrow_e(and_er(ax(v, t))?, ax(&y, sigma))?;
            let bwd = arrow_i(&y, and_i(a, b)?)?;
            Ok((fwd, bwd, [DPath(vec![Dir::L]), DPath(vec![Dir::R])].into_iter().collect()))
        }
        RuleId::SplitArrowOr => {
            let TypeExpr::Arrow(lhs, _) = s else { return Err(WitnessError::InvalidRedex("split needs an arrow".into())) };
            let TypeExpr::Or(sigma, tau) = &**lhs else { return Err(WitnessError::InvalidRedex("split needs a union on the left".into())) };
            let y = nm.fresh();
            let a = arrow_i(&y, arrow_e(ax(v, s), or_il(ax(&y, sigma), tau))?)?;
            let y = nm.fresh();
            let b = arrow_i(&y, arrow_e(ax(v, s), or_ir(sigma, ax(&y, tau)))?)?;
            let fwd = and_i(a, b)?;
            let y = nm.fresh();
            let a = arrow_e(and_el(ax(v, t))?, ax(&y, sigma))?;
            let b = arrow_e(and_er(ax(v, t))?, ax(&y, tau))?;
            let bwd = arrow_i(&y, or_i_prime(&y, &a, &b)?)?;
            Ok((fwd, bwd, [DPath(vec![Dir::L]), DPath(vec![Dir::R])].into_iter().collect()))
        }
        RuleId::EraseTopUnionConjuncts | RuleId::EraseIntersectionComponents | RuleId::EraseUnionComponents => {
            let er = r.erasure.as_ref().ok_or_else(|| WitnessError::InvalidRedex("erasure data missing".into()))?;
            let q: PathSet = if r.rule == RuleId::EraseTopUnionConjuncts {
                er.paths.clone()
            } else {
                let mut q = eps;
                for (_, _, p) in &er.erased {
                    q.extend(p.e_set().iter().cloned());
                }
                q
            };
            let kept = er.kept();
            let comps = &er.components;
            let pos = |k: usize| kept.iter().position(|&x| x == k).expect("kept index");
            let reason = |i: usize| er.erased.iter().find(|(e, _, _)| *e == i).expect("erased index");
            if r.rule == RuleId::EraseUnionComponents {
                let fwd = or_cases(s, v, &mut |k, c| {
                    if kept.contains(&k) {
                        Ok(embed(pl_open(nm, c, &q, v)?, t, pos(k)))
                    } else {
                        let (_, j, p) = reason(k);
                        Ok(embed(keye_open(nm, p, &q, v)?, t, pos(*j)))
                    }
                })?;
                let bwd = or_cases(t, v, &mut |k, c| Ok(embed(pl_open(nm, c, &q, v)?, s, kept[k])))?;
                Ok((fwd, bwd, q))
            } else {
                let fwd = and_tree(t, &mut |k, c| {
                    let u = nm.fresh();
                    Ok(subst_c(&pl_open(nm, c, &q, &u)?, &u, &pick(s, v, kept[k])?)?)
                })?;
                let bwd = and_tree(s, &mut |k, c| {
                    let u = nm.fresh();
                    if kept.contains(&k) {
                        Ok(subst_c(&pl_open(nm, c, &q, &u)?, &u, &pick(t, v, pos(k))?)?)
                    } else {
                        let (_, j, p) = reason(k);
                        debug_assert_eq!(&p.rhs, &comps[k]);
                        Ok(subst_c(&keye_open(nm, p, &q, &u)?, &u, &pick(t, v, pos(*j))?)?)
                    }
                })?;
                Ok((fwd, bwd, q))
            }
        }
    }
}

fn bad_dist() -> WitnessError {
    WitnessError::InvalidRedex("distribution result has an unexpected shape".into())
}

/// Splits a distribution result `(σ∘ρ)•(τ∘ρ)` into `σ, τ, ρ`.
fn dist_parts(t: &TypeExpr) -> Result<(TypeExpr, TypeExpr, TypeExpr), WitnessError> {
    match t {
        TypeExpr::And(a, b) | TypeExpr::Or(a, b) => match (&**a, &**b) {
            (TypeExpr::Or(s, r), TypeExpr::Or(u, _)) | (TypeExpr::And(s, r), TypeExpr::And(u, _)) => {
                Ok(((**s).clone(), (**u).clone(), (**r).clone()))
            }
            _ => Err(bad_dist()),
        },
        _ => Err(bad_dist()),
    }
}

/// `v:s ⊢ v:(σ∧ρ)∨(τ∧ρ)` and back, where `s` is an ∧-spine with one
/// component `σ∨τ` and the others forming `ρ`.
fn dist_and_over_or(nm: &mut Names, s: &TypeExpr, t: &TypeExpr, v: &str) -> Result<(D, D), WitnessError> {
    let (sigma, tau, rho) = dist_parts(t)?;
    let comps = s.and_components();
    let k = comps.iter().position(|c| c == &type_core::or(sigma.clone(), tau.clone())).ok_or_else(bad_dist)?;
    let rest: Vec<usize> = (0..comps.len()).filter(|&i| i != k).collect();
    // v:s ⊢ v:(σ∨τ)∧ρ
    let mut r = 0;
    let rho_d = and_tree(&rho, &mut |_, _| {
        r += 1;
        pick(s, v, rest[r - 1])
    })?;
    let regroup = and_i(pick(s, v, k)?, rho_d)?;
    let y = nm.fresh();
    let sr = type_core::and(sigma.clone(), rho.clone());
    let tr = type_core::and(tau.clone(), rho.clone());
    let d1 = or_il(ax(&y, &sr), &tr);
    let d2 = or_ir(&sr, ax(&y, &tr));
    let fwd = or_e(&y, &sigma, &tau, &rho, d1, d2, regroup)?;
    // v:μ∧ρ ⊢ v:s for μ ∈ {σ, τ}
    let back = |mu: &TypeExpr, left: bool| -> Result<D, WitnessError> {
        let src = type_core::and(mu.clone(), rho.clone());
        and_tree(s, &mut |i, _| {
            if i == k {
                let m = and_el(ax(v, &src))?;
                Ok(if left { or_il(m, &tau) } else { or_ir(&sigma, m) })
            } else {
                let pos = rest.iter().position(|&x| x == i).unwrap();
                let u = "_rho";
                let d = pick(&rho, u, pos)?;
                Ok(subst_c(&d, u, &and_er(ax(v, &src))?)?)
            }
        })
    };
    let bwd = or_i_prime(v, &back(&sigma, true)?, &back(&tau, false)?)?;
    Ok((fwd, bwd))
}

/// `v:s ⊢ v:(σ∨ρ)∧(τ∨ρ)` and back, where `s` is an ∨-spine with one
/// component `σ∧τ` and the others forming `ρ`.
fn dist_or_over_and(nm: &mut Names, s: &TypeExpr, t: &TypeExpr, v: &str) -> Result<(D, D), WitnessError> {
    let (sigma, tau, rho) = dist_parts(t)?;
    let comps = s.or_components();
    let st = type_core::and(sigma.clone(), tau.clone());
    let k = comps.iter().position(|c| c == &st).ok_or_else(bad_dist)?;
    let rest: Vec<usize> = (0..comps.len()).filter(|&i| i != k).collect();
    let fwd = or_cases(s, v, &mut |i, c| {
        if i == k {
            Ok(and_i(or_il(and_el(ax(v, c))?, &rho), or_il(and_er(ax(v, c))?, &rho))?)
        } else {
            let pos = rest.iter().position(|&x| x == i).unwrap();
            let a = or_ir(&sigma, embed(ax(v, c), &rho, pos));
            let b = or_ir(&tau, embed(ax(v, c), &rho, pos));
            Ok(and_i(a, b)?)
        }
    })?;
    // u:ρ ⊢ u:s
    let u = nm.fresh();
    let rho_to_s = or_cases(&rho, &u, &mut |p, c| Ok(embed(ax(&u, c), s, rest[p])))?;
    let from_rho = |x: &str, other: &TypeExpr| -> Result<D, WitnessError> {
        Ok(subst_c(&rho_to_s, &u, &and_el(ax(x, &type_core::and(rho.clone(), other.clone())))?)?)
    };
    let tr = type_core::or(tau.clone(), rho.clone());
    // x:σ∧(τ∨ρ) ⊢ x:s, by cases on τ∨ρ after swapping the conjuncts.
    let x = nm.fresh();
    let z = nm.fresh();
    let sx = type_core::and(sigma.clone(), tr.clone());
    let swapped = and_i(and_er(ax(&x, &sx))?, and_el(ax(&x, &sx))?)?;
    let ts = type_core::and(tau.clone(), sigma.clone());
    let e1 = embed(and_i(and_er(ax(&z, &ts))?, and_el(ax(&z, &ts))?)?, s, k);
    let e2 = from_rho(&z, &sigma)?;
    let d1 = or_e(&z, &tau, &rho, &sigma, e1, e2, swapped)?;
    let d2 = from_rho(&x, &tr)?;
    let d3 = ax(v, t);
    let bwd = or_e(&x, &sigma, &rho, &tr, d1, d2, d3)?;
    Ok((fwd, bwd))
}

/// `v:a ⊢ v:b` and back for types equal up to top-level associativity,
/// commutativity and idempotence.
pub fn ac_witness(a: &TypeExpr, b: &TypeExpr) -> Result<WitnessPair, WitnessError> {
    if !type_core::ac_equal_top(a, b) {
        return Err(WitnessError::InvalidRedex(format!("{a} and {b} differ beyond top-level reordering")));
    }
    if a == b {
        return Ok(WitnessPair::identity(a));
    }
    let one_way = |a: &TypeExpr, b: &TypeExpr| -> Result<D, WitnessError> {
        let ac = a.and_components();
        let key = |c: &TypeExpr| c.or_components().into_iter().collect::<std::collections::BTreeSet<_>>();
        let keys: Vec<_> = ac.iter().map(key).collect();
        let body = and_tree(b, &mut |_, target| {
            let i = keys.iter().position(|k| *k == key(target)).expect("ac-equal");
            let u = "_c";
            let tds = target.or_components();
            let conv = or_cases(&ac[i], u, &mut |_, d| Ok(embed(ax(u, d), target, tds.iter().position(|x| x == d).unwrap())))?;
            Ok(subst_c(&conv, u, &pick(a, "x", i)?)?)
        })?;
        Ok(arrow_i("x", body)?)
    };
    Ok(WitnessPair::new(a, b, one_way(a, b)?, one_way(b, a)?))
}

/// The witness of one step together with the path set of its identity.
pub fn witness_step_with_paths(s: &RewriteStep) -> Result<(WitnessPair, PathSet), WitnessError> {
    let r = &s.redex;
    if r.context.plug(&r.focus) != s.before || r.context.plug(&r.result) != s.after {
        return Err(WitnessError::InvalidRedex("step does not match its redex".into()));
    }
    let v = "x";
    let mut nm = Names(0);
    let (mut fwd, mut bwd, mut q) = local(&mut nm, r, v)?;
    let (mut x, mut x2) = (r.focus.clone(), r.result.clone());
    for f in r.context.frames.iter().rev() {
        let (w, w2) = (f.wrap(x.clone()), f.wrap(x2.clone()));
        match f {
            Frame::ArrowLhs(_) => {
                let y = nm.fresh();
                let f2 = arrow_i(&y, arrow_e(ax(v, &w), rename(&bwd, v, &y)?)?)?;
                let b2 = arrow_i(&y, arrow_e(ax(v, &w2), rename(&fwd, v, &y)?)?)?;
                fwd = f2;
                bwd = b2;
                q = prefix_all(Dir::L, &q);
            }
            Frame::ArrowRhs(tau) => {
                let y = nm.fresh();
                fwd = arrow_i(&y, subst_c(&fwd, v, &arrow_e(ax(v, &w), ax(&y, tau))?)?)?;
                bwd = arrow_i(&y, subst_c(&bwd, v, &arrow_e(ax(v, &w2), ax(&y, tau))?)?)?;
                q = prefix_all(Dir::R, &q);
            }
            Frame::AndLeft(sib) | Frame::AndRight(sib) => {
                let left = matches!(f, Frame::AndLeft(_));
                let mut side = |d: &D, from: &TypeExpr| -> Result<D, WitnessError> {
                    let u = nm.fresh();
                    let sib_d = pl_open(&mut nm, sib, &q, &u)?;
                    let (main_pick, sib_pick) =
                        if left { (and_el(ax(v, from))?, and_er(ax(v, from))?) } else { (and_er(ax(v, from))?, and_el(ax(v, from))?) };
                    let main = subst_c(d, v, &main_pick)?;
                    let other = subst_c(&sib_d, &u, &sib_pick)?;
                    Ok(if left { and_i(main, other)? } else { and_i(other, main)? })
                };
                let f2 = side(&fwd, &w)?;
                let b2 = side(&bwd, &w2)?;
                fwd = f2;
                bwd = b2;
            }
            Frame::OrLeft(sib) | Frame::OrRight(sib) => {
                let left = matches!(f, Frame::OrLeft(_));
                let mut side = |d: D, to: &TypeExpr| -> Result<D, WitnessError> {
                    let sib_d = pl_open(&mut nm, sib, &q, v)?;
                    let (a, b) = if left { (or_il(d, sib), or_ir(to, sib_d)) } else { (or_il(sib_d, to), or_ir(sib, d)) };
                    Ok(or_i_prime(v, &a, &b)?)
                };
                let f2 = side(fwd, &x2)?;
                let b2 = side(bwd, &x)?;
                fwd = f2;
                bwd = b2;
            }
        }
        x = w;
        x2 = w2;
    }
    let pair = WitnessPair::new(&s.before, &s.after, arrow_i(v, fwd)?, arrow_i(v, bwd)?);
    Ok((pair, q))
}

pub fn witness_step(s: &RewriteStep) -> Result<WitnessPair, WitnessError> {
    witness_step_with_paths(s).map(|(w, _)| w)
}

/// Composes the step witnesses of a trace starting at `source`.
pub fn witness_trace(source: &TypeExpr, tr: &RewriteTrace) -> Result<WitnessPair, WitnessError> {
    let mut cur = source;
    for (k, s) in tr.steps.iter().enumerate() {
        if &s.before != cur {
            return Err(WitnessError::BrokenChain(k.saturating_sub(1), k));
        }
        cur = &s.after;
    }
    let pairs = tr.steps.iter().map(witness_step).collect::<Result<Vec<_>, _>>()?;
    chain(source, &pairs)
}

// ---------------------------------------------------------------------------
// Basic laws.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Law {
    /// `σ∧σ ≈ σ`
    Idem(Connective),
    /// `σ∧τ ≈ τ∧σ`
    Comm(Connective),
    /// `(σ∧τ)∧ρ ≈ σ∧(τ∧ρ)`
    Assoc(Connective),
    /// `σ→τ∧ρ ≈ (σ→τ)∧(σ→ρ)`
    DistArrowAnd,
    /// `σ∨τ→ρ ≈ (σ→ρ)∧(τ→ρ)`
    DistArrowOr,
    /// `σ→τ→ρ ≈ τ→σ→ρ`
    Swap,
    /// `(σ∨τ)∧ρ ≈ (σ∧ρ)∨(τ∧ρ)`
    DistAndOr,
    /// `(σ∧τ)∨ρ ≈ (σ∨ρ)∧(τ∨ρ)`
    DistOrAnd,
}

impl Law {
    /// The eight laws, with the intersection reading of the first three.
    pub const ALL: [Law; 8] = [
        Law::Idem(Connective::And),
        Law::Comm(Connective::And),
        Law::Assoc(Connective::And),
        Law::DistArrowAnd,
        Law::DistArrowOr,
        Law::Swap,
        Law::DistAndOr,
        Law::DistOrAnd,
    ];

    pub fn arity(self) -> usize {
        match self {
            Law::Idem(_) => 1,
            Law::Comm(_) => 2,
            _ => 3,
        }
    }

    /// The two sides of the law at the given component types.
    pub fn sides(self, c: &[TypeExpr]) -> (TypeExpr, TypeExpr) {
        use type_core::{and, arrow, or};
        let op = |k: Connective, a: TypeExpr, b: TypeExpr| match k {
            Connective::And => and(a, b),
            Connective::Or => or(a, b),
        };
        let g = |i: usize| c[i].clone();
        match self {
            Law::Idem(k) => (op(k, g(0), g(0)), g(0)),
            Law::Comm(k) => (op(k, g(0), g(1)), op(k, g(1), g(0))),
            Law::Assoc(k) => (op(k, op(k, g(0), g(1)), g(2)), op(k, g(0), op(k, g(1), g(2)))),
            Law::DistArrowAnd => (arrow(g(0), and(g(1), g(2))), and(arrow(g(0), g(1)), arrow(g(0), g(2)))),
            Law::DistArrowOr => (arrow(or(g(0), g(1)), g(2)), and(arrow(g(0), g(2)), arrow(g(1), g(2)))),
            Law::Swap => (arrow(g(0), arrow(g(1), g(2))), arrow(g(1), arrow(g(0), g(2)))),
            Law::DistAndOr => (and(or(g(0), g(1)), g(2)), or(and(g(0), g(2)), and(g(1), g(2)))),
            Law::DistOrAnd => (or(and(g(0), g(1)), g(2)), and(or(g(0), g(2)), or(g(1), g(2)))),
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = |c: &Connective| if *c == Connective::And { "and" } else { "or" };
        match self {
            Law::Idem(c) => write!(f, "idem-{}", k(c)),
            Law::Comm(c) => write!(f, "comm-{}", k(c)),
            Law::Assoc(c) => write!(f, "assoc-{}", k(c)),
            Law::DistArrowAnd => f.write_str("dist-arrow-and"),
            Law::DistArrowOr => f.write_str("dist-arrow-or"),
            Law::Swap => f.write_str("swap"),
            Law::DistAndOr => f.write_str("dist-and-or"),
            Law::DistOrAnd => f.write_str("dist-or-and"),
        }
    }
}

fn swap_derivation(sigma: &TypeExpr, tau: &TypeExpr, rho: &TypeExpr) -> Result<D, WitnessError> {
    let src = type_core::arrow(sigma.clone(), type_core::arrow(tau.clone(), rho.clone()));
    let body = arrow_e(arrow_e(ax("x", &src), ax("y2", sigma))?, ax("y1", tau))?;
    Ok(arrow_i("x", arrow_i("y1", arrow_i("y2", body)?)?)?)
}

pub fn witness_basic_iso(law: Law, instances: &[TypeExpr]) -> Result<WitnessPair, WitnessError> {
    if instances.len() != law.arity() {
        return Err(WitnessError::Arity { law, expected: law.arity(), got: instances.len() });
    }
    let (a, b) = law.sides(instances);
    match law {
        Law::Swap => {
            let f = swap_derivation(&instances[0], &instances[1], &instances[2])?;
            let g = swap_derivation(&instances[1], &instances[0], &instances[2])?;
            Ok(WitnessPair::new(&a, &b, f, g))
        }
        Law::DistArrowAnd | Law::DistArrowOr => {
            let rule = if law == Law::DistArrowAnd { RuleId::SplitArrowAnd } else { RuleId::SplitArrowOr };
            let redex = Redex { rule, context: Default::default(), focus: a.clone(), result: b.clone(), erasure: None };
            witness_step(&RewriteStep { before: a, after: b, redex })
        }
        _ => WitnessPair::by_variables(&a, &b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{alpha_eq, beta_eta_nf, fhi_of_set};
    use crate::rewrite::{normalize, Strategy};
    use crate::syntax::{parse_term, parse_type};

    fn t(s: &str) -> TypeExpr {
        parse_type(s).unwrap()
    }

    fn all_steps(s: &str) -> Vec<RewriteStep> {
        normalize(&t(s), Strategy::LeftmostOutermost).unwrap().1.steps
    }

    #[test]
    fn split_step_term() {
        let steps = all_steps("a -> b & c");
        let w = witness_step(&steps[0]).unwrap();
        w.check().unwrap();
        let lxy = parse_term("\\x y. x y").unwrap();
        assert!(alpha_eq(&w.forward_term, &lxy));
        assert!(alpha_eq(&w.backward_term, &lxy));
    }

    #[test]
    fn erasure_step_term() {
        let steps = all_steps("(m -> p -> c) & (m -> (p & n -> c) | q1) & (m -> (p & n -> c) | q2)");
        for s in &steps {
            let (w, q) = witness_step_with_paths(s).unwrap();
            w.check().unwrap();
            assert!(alpha_eq(&w.forward_term, &fhi_of_set(&q)), "{} vs {}", w.forward_term, fhi_of_set(&q));
        }
    }

    #[test]
    fn trace_witness() {
        let src = t("a -> (b & c) | d");
        let (_, tr) = normalize(&src, Strategy::LeftmostOutermost).unwrap();
        let w = witness_trace(&src, &tr).unwrap();
        w.check().unwrap();
        let id = Term::identity();
        assert!(alpha_eq(&beta_eta_nf(&w.forward_term, 100_000).unwrap(), &id));
        assert!(alpha_eq(&beta_eta_nf(&w.backward_term, 100_000).unwrap(), &id));
    }

    #[test]
    fn laws() {
        let abc = [t("a"), t("b"), t("c")];
        let w = witness_basic_iso(Law::Swap, &abc).unwrap();
        w.check().unwrap();
        assert!(alpha_eq(&w.forward_term, &parse_term("\\x y1 y2. x y2 y1").unwrap()));
        for law in Law::ALL {
            let w = witness_basic_iso(law, &abc[..law.arity()]).unwrap();
            w.check().unwrap();
        }
    }
}
