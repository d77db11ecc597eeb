//! The normalisation rules: two distributions, two splittings, three
//! erasures. Redexes are searched at maximal `∧`/`∨` spines, whose
//! components are matched as multisets when the context path is defined.

use crate::paths::{agrees_set, concat_prefix, DPath, Dir, Frame, PathSet, TypeContext};
use crate::preorder::{try_leq, LeqKind, LeqProof};
use crate::type_core::{self, and_all, or_all, TypeExpr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    /// `C[(σ∧τ)∨ρ] ⟹ C[(σ∨ρ)∧(τ∨ρ)]`
    DistOrOverAnd,
    /// `C[(σ∨τ)∧ρ] ⟹ C[(σ∧ρ)∨(τ∧ρ)]`
    DistAndOverOr,
    /// `C[σ→τ∧ρ] ⟹ C[(σ→τ)∧(σ→ρ)]`
    SplitArrowAnd,
    /// `C[σ∨τ→ρ] ⟹ C[(σ→ρ)∧(τ→ρ)]`
    SplitArrowOr,
    EraseTopUnionConjuncts,
    EraseIntersectionComponents,
    EraseUnionComponents,
    /// Sorts and de-duplicates one spine at a position whose d-path is
    /// defined. Not a normalisation rule; used to compare normal forms.
    AcReorder,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::DistOrOverAnd => "DistOrOverAnd",
            RuleId::DistAndOverOr => "DistAndOverOr",
            RuleId::SplitArrowAnd => "SplitArrowAnd",
            RuleId::SplitArrowOr => "SplitArrowOr",
            RuleId::EraseTopUnionConjuncts => "EraseTopUnionConjuncts",
            RuleId::EraseIntersectionComponents => "EraseIntersectionComponents",
            RuleId::EraseUnionComponents => "EraseUnionComponents",
            RuleId::AcReorder => "AcReorder",
        }
    }

    pub fn is_erasure(self) -> bool {
        matches!(self, RuleId::EraseTopUnionConjuncts | RuleId::EraseIntersectionComponents | RuleId::EraseUnionComponents)
    }

    fn priority(self) -> u8 {
        match self {
            RuleId::SplitArrowAnd | RuleId::SplitArrowOr => 0,
            RuleId::DistOrOverAnd | RuleId::DistAndOverOr => 1,
            RuleId::AcReorder => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The data of an erasure: the spine components, the erased ones with the
/// kept component they are compared to, and the path set `𝒫`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Erasure {
    pub components: Vec<TypeExpr>,
    /// `(i, j_i, proof)`: component `i` is erased because of component `j_i`.
    /// For intersections the proof is `α_{j_i} ≤ α_i`, for unions `α_i ≤ α_{j_i}`.
    pub erased: Vec<(usize, usize, LeqProof)>,
    pub paths: PathSet,
}

impl Erasure {
    pub fn kept(&self) -> Vec<usize> {
        (0..self.components.len()).filter(|k| !self.erased.iter().any(|(i, _, _)| i == k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub rule: RuleId,
    pub context: TypeContext,
    pub focus: TypeExpr,
    pub result: TypeExpr,
    pub erasure: Option<Erasure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub before: TypeExpr,
    pub after: TypeExpr,
    pub redex: Redex,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteTrace {
    pub steps: Vec<RewriteStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("invalid redex: {0}")]
    InvalidRedex(String),
    #[error("normalisation did not finish within {0} steps")]
    StepBudgetExceeded(usize),
    #[error("spine of width {width} exceeds the cap of {cap}")]
    SpineTooWide { width: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
    Random(u64),
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lo" | "leftmost-outermost" => Ok(Strategy::LeftmostOutermost),
            "ri" | "rightmost-innermost" => Ok(Strategy::RightmostInnermost),
            "random" => Ok(Strategy::Random(0)),
            _ => Err(format!("unknown strategy {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RewriteConfig {
    pub step_budget: usize,
    pub spine_cap: usize,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        RewriteConfig { step_budget: 10_000, spine_cap: 16 }
    }
}

// ---------------------------------------------------------------------------
// Termination ordering.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    TopOrRight,
    LeftOfArrow,
}

impl Polarity {
    /// The polarity of a hole: left of an arrow when the innermost arrow
    /// frame above it is a left-hand side.
    pub fn of_context(c: &TypeContext) -> Polarity {
        match c.frames.iter().rev().find(|f| matches!(f, Frame::ArrowLhs(_) | Frame::ArrowRhs(_))) {
            Some(Frame::ArrowLhs(_)) => Polarity::LeftOfArrow,
            _ => Polarity::TopOrRight,
        }
    }
}

fn precedence(t: &TypeExpr, pol: Polarity) -> u8 {
    match (t, pol) {
        (TypeExpr::Atom(_), _) => 0,
        (TypeExpr::Arrow(..), _) => 3,
        (TypeExpr::Or(..), Polarity::TopOrRight) | (TypeExpr::And(..), Polarity::LeftOfArrow) => 2,
        _ => 1,
    }
}

fn args(t: &TypeExpr) -> Vec<&TypeExpr> {
    match t {
        TypeExpr::Atom(_) => vec![],
        TypeExpr::Arrow(l, r) | TypeExpr::And(l, r) | TypeExpr::Or(l, r) => vec![l, r],
    }
}

/// The recursive path ordering (multiset status) induced by the
/// polarity's precedence. Atoms are minimal and pairwise incomparable.
pub fn rpo_greater(s: &TypeExpr, t: &TypeExpr, pol: Polarity) -> bool {
    if s.is_atom() {
        return false;
    }
    let sa = args(s);
    if sa.iter().any(|si| *si == t || rpo_greater(si, t, pol)) {
        return true;
    }
    let (ps, pt) = (precedence(s, pol), precedence(t, pol));
    if ps > pt {
        return args(t).iter().all(|tj| rpo_greater(s, tj, pol));
    }
    if ps == pt && !t.is_atom() {
        return multiset_greater(&sa, &args(t), pol);
    }
    false
}

fn multiset_greater(m: &[&TypeExpr], n: &[&TypeExpr], pol: Polarity) -> bool {
    let mut m: Vec<&TypeExpr> = m.to_vec();
    let mut n: Vec<&TypeExpr> = n.to_vec();
    let mut k = 0;
    while k < n.len() {
        if let Some(pos) = m.iter().position(|x| *x == n[k]) {
            m.remove(pos);
            n.remove(k);
        } else {
            k += 1;
        }
    }
    !m.is_empty() && n.iter().all(|y| m.iter().any(|x| rpo_greater(x, y, pol)))
}

// ---------------------------------------------------------------------------
// Redex search.

fn is_maximal_and(ctx: &TypeContext, t: &TypeExpr) -> bool {
    matches!(t, TypeExpr::And(..)) && !matches!(ctx.frames.last(), Some(Frame::AndLeft(_) | Frame::AndRight(_)))
}

fn is_maximal_or(ctx: &TypeContext, t: &TypeExpr) -> bool {
    matches!(t, TypeExpr::Or(..)) && !matches!(ctx.frames.last(), Some(Frame::OrLeft(_) | Frame::OrRight(_)))
}

fn split_redexes(ctx: &TypeContext, t: &TypeExpr, out: &mut Vec<Redex>) {
    let TypeExpr::Arrow(l, r) = t else { return };
    if ctx.spath().is_none() {
        return;
    }
    let mk = |rule, result| Redex { rule, context: ctx.clone(), focus: t.clone(), result, erasure: None };
    if let TypeExpr::And(a, b) = &**r {
        let res = type_core::and(type_core::arrow((**l).clone(), (**a).clone()), type_core::arrow((**l).clone(), (**b).clone()));
        out.push(mk(RuleId::SplitArrowAnd, res));
    }
    if let TypeExpr::Or(a, b) = &**l {
        let res = type_core::and(type_core::arrow((**a).clone(), (**r).clone()), type_core::arrow((**b).clone(), (**r).clone()));
        out.push(mk(RuleId::SplitArrowOr, res));
    }
}

fn dist_redexes(ctx: &TypeContext, t: &TypeExpr, out: &mut Vec<Redex>) {
    let Some(dp) = ctx.dpath() else { return };
    let at_right = dp.last() != Some(Dir::L);
    if at_right && is_maximal_or(ctx, t) {
        let comps = t.or_components();
        if let Some(k) = comps.iter().position(|c| matches!(c, TypeExpr::And(..))) {
            let TypeExpr::And(s, u) = &comps[k] else { unreachable!() };
            let rest: Vec<TypeExpr> = comps.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, c)| c.clone()).collect();
            let rho = or_all(&rest);
            let result = type_core::and(type_core::or((**s).clone(), rho.clone()), type_core::or((**u).clone(), rho));
            out.push(Redex { rule: RuleId::DistOrOverAnd, context: ctx.clone(), focus: t.clone(), result, erasure: None });
        }
    }
    if !at_right && is_maximal_and(ctx, t) {
        let comps = t.and_components();
        if let Some(k) = comps.iter().position(|c| matches!(c, TypeExpr::Or(..))) {
            let TypeExpr::Or(s, u) = &comps[k] else { unreachable!() };
            let rest: Vec<TypeExpr> = comps.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, c)| c.clone()).collect();
            let rho = and_all(&rest);
            let result = type_core::or(type_core::and((**s).clone(), rho.clone()), type_core::and((**u).clone(), rho));
            out.push(Redex { rule: RuleId::DistAndOverOr, context: ctx.clone(), focus: t.clone(), result, erasure: None });
        }
    }
}

/// The pre-rewrite regrouping that a distribution step certifies:
/// `(σ∧τ)∨ρ` or `(σ∨τ)∧ρ` with `ρ` the remaining spine.
pub fn dist_instance(r: &Redex) -> Option<TypeExpr> {
    match (r.rule, &r.result) {
        (RuleId::DistOrOverAnd, TypeExpr::And(a, b)) => {
            let (TypeExpr::Or(s, rho), TypeExpr::Or(u, _)) = (&**a, &**b) else { return None };
            Some(type_core::or(type_core::and((**s).clone(), (**u).clone()), (**rho).clone()))
        }
        (RuleId::DistAndOverOr, TypeExpr::Or(a, b)) => {
            let (TypeExpr::And(s, rho), TypeExpr::And(u, _)) = (&**a, &**b) else { return None };
            Some(type_core::and(type_core::or((**s).clone(), (**u).clone()), (**rho).clone()))
        }
        _ => None,
    }
}

/// Rebuilds a spine keeping only the marked leaves, in place.
fn prune(t: &TypeExpr, meet: bool, keep: &[bool], idx: &mut usize) -> Option<TypeExpr> {
    match t {
        TypeExpr::And(l, r) if meet => combine(prune(l, meet, keep, idx), prune(r, meet, keep, idx), meet),
        TypeExpr::Or(l, r) if !meet => combine(prune(l, meet, keep, idx), prune(r, meet, keep, idx), meet),
        _ => {
            let k = *idx;
            *idx += 1;
            keep[k].then(|| t.clone())
        }
    }
}

fn combine(a: Option<TypeExpr>, b: Option<TypeExpr>, meet: bool) -> Option<TypeExpr> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if meet { type_core::and(a, b) } else { type_core::or(a, b) }),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Subsets of `items` of size `k`, in lexicographic order.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Choice maps examined per candidate subset.
const CHOICE_LIMIT: usize = 4096;

/// Which of the three erasure rules a spine search is for.
#[derive(Clone, Copy, PartialEq, Eq)]
enum EraseKind {
    TopUnion,
    Meet,
    Join,
}

/// Searches erasures of one spine. `candidates` are the erasable
/// component indices; `admissible(J, P)` checks the agreement condition.
#[allow(clippy::too_many_arguments)]
fn erase_search(
    kind: EraseKind,
    ctx: &TypeContext,
    focus: &TypeExpr,
    comps: &[TypeExpr],
    candidates: &[usize],
    prefix: Option<&DPath>,
    admissible: &dyn Fn(&[usize], &PathSet) -> bool,
    all: bool,
    cap: usize,
    out: &mut Vec<Redex>,
) {
    let n = candidates.len();
    if n < 2 {
        return;
    }
    // le[i][j]: proof that j may stand for i.
    let proof = |i: usize, j: usize| -> Option<LeqProof> {
        match kind {
            EraseKind::TopUnion => try_leq(&comps[j], &comps[i], LeqKind::Join),
            EraseKind::Meet => try_leq(&comps[j], &comps[i], LeqKind::Meet),
            EraseKind::Join => try_leq(&comps[i], &comps[j], LeqKind::Join),
        }
    };
    let mut table: Vec<Vec<Option<LeqProof>>> = vec![vec![None; comps.len()]; comps.len()];
    for &i in candidates {
        for &j in candidates {
            if i != j {
                table[i][j] = proof(i, j);
            }
        }
    }
    let rule = match kind {
        EraseKind::TopUnion => RuleId::EraseTopUnionConjuncts,
        EraseKind::Meet => RuleId::EraseIntersectionComponents,
        EraseKind::Join => RuleId::EraseUnionComponents,
    };
    // Only components with a possible replacement can be erased.
    let erasable: Vec<usize> = candidates.iter().copied().filter(|&i| table[i].iter().any(Option::is_some)).collect();
    if erasable.is_empty() {
        return;
    }
    let fixed: Vec<usize> = candidates.iter().copied().filter(|i| !erasable.contains(i)).collect();
    let kept_sets: Box<dyn Iterator<Item = Vec<usize>>> = if erasable.len() <= cap {
        let er = erasable.clone();
        Box::new((0..erasable.len()).flat_map(move |size| combinations(&er, size)).filter_map(move |extra| {
            let mut kept: Vec<usize> = fixed.iter().copied().chain(extra).collect();
            kept.sort_unstable();
            (!kept.is_empty()).then_some(kept)
        }))
    } else {
        // Too many to enumerate: erase one component at a time.
        let cands = candidates.to_vec();
        Box::new(erasable.clone().into_iter().map(move |i| cands.iter().copied().filter(|&k| k != i).collect()))
    };
    {
        for kept in kept_sets {
            let erased: Vec<usize> = candidates.iter().copied().filter(|i| !kept.contains(i)).collect();
            let mut opts: Vec<Vec<usize>> = Vec::with_capacity(erased.len());
            for &i in &erased {
                let mut o: Vec<usize> = kept.iter().copied().filter(|&j| table[i][j].is_some()).collect();
                o.sort_by_key(|&j| (table[i][j].as_ref().unwrap().e_set().len(), j));
                opts.push(o);
            }
            if opts.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0usize; opts.len()];
            let mut tried = 0;
            'choices: loop {
                tried += 1;
                let mut e = PathSet::new();
                for (k, &o) in idx.iter().enumerate() {
                    let j = opts[k][o];
                    e.extend(table[erased[k]][j].as_ref().unwrap().e_set().iter().cloned());
                }
                let paths = match prefix {
                    Some(p) => concat_prefix(p, &e),
                    None => e,
                };
                if admissible(&kept, &paths) {
                    let keep: Vec<bool> = (0..comps.len()).map(|k| !erased.contains(&k)).collect();
                    let result = prune(focus, kind != EraseKind::Join, &keep, &mut 0).expect("a component is kept");
                    let erased_info = erased
                        .iter()
                        .zip(&idx)
                        .enumerate()
                        .map(|(k, (&i, &o))| {
                            let j = opts[k][o];
                            (i, j, table[i][j].clone().unwrap())
                        })
                        .collect();
                    out.push(Redex {
                        rule,
                        context: ctx.clone(),
                        focus: focus.clone(),
                        result,
                        erasure: Some(Erasure { components: comps.to_vec(), erased: erased_info, paths }),
                    });
                    if !all {
                        return;
                    }
                    break 'choices;
                }
                if tried >= CHOICE_LIMIT {
                    break;
                }
                let mut k = idx.len();
                loop {
                    if k == 0 {
                        break 'choices;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < opts[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
    }
}

fn erase_redexes(ctx: &TypeContext, t: &TypeExpr, cfg: &RewriteConfig, all: bool, out: &mut Vec<Redex>) -> Result<(), RewriteError> {
    let meet = is_maximal_and(ctx, t);
    let join = is_maximal_or(ctx, t);
    if !meet && !join {
        return Ok(());
    }
    let comps = if meet { t.and_components() } else { t.or_components() };
    let alphas: Vec<usize> = (0..comps.len()).filter(|&k| comps[k].is_alpha()).collect();
    // Past the cap the search turns greedy; this bounds even that.
    let limit = cfg.spine_cap.saturating_mul(cfg.spine_cap);
    let check_width = |w: usize| if w > limit { Err(RewriteError::SpineTooWide { width: w, cap: limit }) } else { Ok(()) };
    if meet && ctx.is_hole() && comps.iter().all(TypeExpr::is_basic_union) {
        check_width(comps.len())?;
        let all_idx: Vec<usize> = (0..comps.len()).collect();
        let adm = |kept: &[usize], p: &PathSet| kept.iter().all(|&j| agrees_set(&comps[j], p));
        let before = out.len();
        erase_search(EraseKind::TopUnion, ctx, t, &comps, &all_idx, None, &adm, all, cfg.spine_cap, out);
        if !all && out.len() > before {
            return Ok(());
        }
    }
    if alphas.len() < 2 {
        return Ok(());
    }
    check_width(alphas.len())?;
    let Some(dp) = ctx.dpath() else { return Ok(()) };
    let rest: Vec<TypeExpr> = (0..comps.len()).filter(|k| !comps[*k].is_alpha()).map(|k| comps[k].clone()).collect();
    // The non-α components sit in the context next to the hole.
    if rest.iter().any(|r| !crate::paths::agrees(r, &dp)) {
        return Ok(());
    }
    let with_rest = |a: &TypeExpr| -> TypeExpr {
        let mut v = vec![a.clone()];
        v.extend(rest.iter().cloned());
        if meet {
            and_all(&v)
        } else {
            or_all(&v)
        }
    };
    let adm = |kept: &[usize], p: &PathSet| kept.iter().all(|&j| agrees_set(&ctx.plug(&with_rest(&comps[j])), p));
    let kind = if meet { EraseKind::Meet } else { EraseKind::Join };
    erase_search(kind, ctx, t, &comps, &alphas, Some(&dp), &adm, all, cfg.spine_cap, out);
    Ok(())
}

/// Redexes rooted at one position, highest priority first. With `all`
/// unset, stops at the first erasure found for each spine.
fn redexes_at(ctx: &TypeContext, t: &TypeExpr, cfg: &RewriteConfig, all: bool) -> Result<Vec<Redex>, RewriteError> {
    let mut out = Vec::new();
    split_redexes(ctx, t, &mut out);
    if !all && !out.is_empty() {
        return Ok(out);
    }
    dist_redexes(ctx, t, &mut out);
    if !all && !out.is_empty() {
        return Ok(out);
    }
    erase_redexes(ctx, t, cfg, all, &mut out)?;
    Ok(out)
}

/// Every redex of `t`, in pre-order of positions and rule priority.
pub fn find_redexes(t: &TypeExpr) -> Vec<Redex> {
    find_redexes_with(t, &RewriteConfig::default()).unwrap_or_default()
}

pub fn find_redexes_with(t: &TypeExpr, cfg: &RewriteConfig) -> Result<Vec<Redex>, RewriteError> {
    let mut out = Vec::new();
    for (ctx, sub) in crate::paths::subterms(t) {
        let mut rs = redexes_at(&ctx, &sub, cfg, true)?;
        rs.sort_by_key(|r| r.rule.priority());
        out.extend(rs);
    }
    Ok(out)
}

/// The preferred redex at one position: rule priority, then the largest erasure.
fn best_at(ctx: &TypeContext, t: &TypeExpr, cfg: &RewriteConfig) -> Result<Option<Redex>, RewriteError> {
    let rs = redexes_at(ctx, t, cfg, false)?;
    Ok(rs.into_iter().min_by_key(|r| (r.rule.priority(), r.result.size())))
}

pub fn is_normal(t: &TypeExpr) -> bool {
    is_normal_with(t, &RewriteConfig::default()).unwrap_or(false)
}

pub fn is_normal_with(t: &TypeExpr, cfg: &RewriteConfig) -> Result<bool, RewriteError> {
    for (ctx, sub) in crate::paths::subterms(t) {
        if !redexes_at(&ctx, &sub, cfg, false)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Applies a redex after checking it against `t`.
pub fn apply(t: &TypeExpr, r: &Redex) -> Result<TypeExpr, RewriteError> {
    if &r.context.plug(&r.focus) != t {
        return Err(RewriteError::InvalidRedex("focus and context do not rebuild the type".into()));
    }
    if r.rule == RuleId::AcReorder {
        let spine = is_maximal_and(&r.context, &r.focus) || is_maximal_or(&r.context, &r.focus);
        if !spine || r.context.dpath().is_none() || r.result != ac_sorted_spine(&r.focus) {
            return Err(RewriteError::InvalidRedex("AcReorder needs a spine at a defined path".into()));
        }
        return Ok(r.context.plug(&r.result));
    }
    let found = redexes_at(&r.context, &r.focus, &RewriteConfig { step_budget: 0, spine_cap: usize::MAX }, true)?;
    if !found.iter().any(|f| f.rule == r.rule && f.result == r.result) {
        return Err(RewriteError::InvalidRedex(format!("{} does not apply at this position", r.rule)));
    }
    Ok(r.context.plug(&r.result))
}

pub fn normalize(t: &TypeExpr, strategy: Strategy) -> Result<(TypeExpr, RewriteTrace), RewriteError> {
    normalize_with(t, strategy, &RewriteConfig::default())
}

pub fn normalize_with(t: &TypeExpr, strategy: Strategy, cfg: &RewriteConfig) -> Result<(TypeExpr, RewriteTrace), RewriteError> {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut cur = t.clone();
    let mut trace = RewriteTrace::default();
    while let Some(redex) = next_redex(&cur, strategy, rng.as_mut(), cfg)? {
        if trace.steps.len() >= cfg.step_budget {
            return Err(RewriteError::StepBudgetExceeded(cfg.step_budget));
        }
        let after = redex.context.plug(&redex.result);
        trace.steps.push(RewriteStep { before: cur.clone(), after: after.clone(), redex });
        cur = after;
    }
    Ok((cur, trace))
}

fn next_redex(t: &TypeExpr, strategy: Strategy, rng: Option<&mut ChaCha8Rng>, cfg: &RewriteConfig) -> Result<Option<Redex>, RewriteError> {
    let positions = crate::paths::subterms(t);
    match strategy {
        Strategy::LeftmostOutermost => {
            for (ctx, sub) in &positions {
                if let Some(r) = best_at(ctx, sub, cfg)? {
                    return Ok(Some(r));
                }
            }
            Ok(None)
        }
        Strategy::RightmostInnermost => {
            for (ctx, sub) in positions.iter().rev() {
                if let Some(r) = best_at(ctx, sub, cfg)? {
                    return Ok(Some(r));
                }
            }
            Ok(None)
        }
        Strategy::Random(_) => {
            let mut found = Vec::new();
            for (ctx, sub) in &positions {
                if let Some(r) = best_at(ctx, sub, cfg)? {
                    found.push(r);
                }
            }
            if found.is_empty() {
                return Ok(None);
            }
            let k = rng.expect("random strategy carries a generator").gen_range(0..found.len());
            Ok(Some(found.swap_remove(k)))
        }
    }
}

fn ac_sorted_spine(t: &TypeExpr) -> TypeExpr {
    let meet = matches!(t, TypeExpr::And(..));
    let mut comps = if meet { t.and_components() } else { t.or_components() };
    comps.sort();
    comps.dedup();
    if meet {
        and_all(&comps)
    } else {
        or_all(&comps)
    }
}

/// Sorts and de-duplicates every spine whose d-path is defined, innermost
/// first, one [`RuleId::AcReorder`] step per spine. Two types related by
/// these steps are isomorphic through the identity at the spine's path.
pub fn ac_canonical_trace(t: &TypeExpr) -> (TypeExpr, RewriteTrace) {
    let mut cur = t.clone();
    let mut trace = RewriteTrace::default();
    loop {
        let found = crate::paths::subterms(&cur).into_iter().rev().find(|(ctx, sub)| {
            (is_maximal_and(ctx, sub) || is_maximal_or(ctx, sub)) && ctx.dpath().is_some() && &ac_sorted_spine(sub) != sub
        });
        let Some((context, focus)) = found else { break };
        let result = ac_sorted_spine(&focus);
        let after = context.plug(&result);
        let redex = Redex { rule: RuleId::AcReorder, context, focus, result, erasure: None };
        trace.steps.push(RewriteStep { before: cur, after: after.clone(), redex });
        cur = after;
    }
    (cur, trace)
}

pub fn canonical_ac(t: &TypeExpr) -> TypeExpr {
    ac_canonical_trace(t).0
}

/// Whether `t` is an intersection of unions of atoms and arrows at top level.
pub fn has_normal_shape(t: &TypeExpr) -> bool {
    t.and_components().iter().all(TypeExpr::is_basic_union)
}
