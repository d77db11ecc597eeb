//! The preorders `≤∧` on basic intersections and `≤∨` on basic unions,
//! with proof objects and the path set `e` extracted from a proof.

use crate::paths::{prefix_all, DPath, Dir, PathSet};
use crate::type_core::TypeExpr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LeqKind {
    Meet,
    Join,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LeqRule {
    Reflexivity,
    /// `φ ∧ μ ≤∧ φ` and `φ ∧ μ ∧ λ ≤∧ φ ∧ μ`.
    MeetAtom,
    /// `φ ≤∨ φ ∨ χ` and `φ ∨ χ ≤∨ φ ∨ χ ∨ ι`.
    JoinAtom,
    /// `⋀(μi → χi) [∧ λ] ≤∧ ⋀(νi → κi)`.
    MeetArrow,
    /// `⋁(μi → χi) ≤∨ ⋁(νi → κi) [∨ ι]`.
    JoinArrow,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LeqError {
    #[error("{lhs} and {rhs} are not related")]
    NotRelated { lhs: String, rhs: String },
    #[error("{0} is not in the stratum required by the relation")]
    StrataMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeqProof {
    pub kind: LeqKind,
    pub lhs: TypeExpr,
    pub rhs: TypeExpr,
    pub rule: LeqRule,
    /// Whether the optional `λ` (for meets) or `ι` (for joins) is present.
    pub extra: bool,
    /// For arrow rules, one entry per pair in `pairing`: a proof of
    /// `ν ≤∧ μ` and a proof of `χ ≤∨ κ`.
    pub children: Vec<(LeqProof, LeqProof)>,
    /// For arrow rules, `(lhs component, rhs component)` index pairs.
    pub pairing: Vec<(usize, usize)>,
    e: PathSet,
}

impl LeqProof {
    pub fn e_set(&self) -> &PathSet {
        &self.e
    }

    fn leaf(kind: LeqKind, lhs: &TypeExpr, rhs: &TypeExpr, rule: LeqRule) -> Self {
        let e = if rule == LeqRule::Reflexivity {
            PathSet::new()
        } else {
            [DPath::empty()].into_iter().collect()
        };
        LeqProof { kind, lhs: lhs.clone(), rhs: rhs.clone(), rule, extra: rule != LeqRule::Reflexivity, children: Vec::new(), pairing: Vec::new(), e }
    }

    /// Number of proof nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|(a, b)| a.size() + b.size()).sum::<usize>()
    }
}

fn components(t: &TypeExpr, kind: LeqKind) -> Vec<TypeExpr> {
    match kind {
        LeqKind::Meet => t.and_components(),
        LeqKind::Join => t.or_components(),
    }
}

fn in_stratum(t: &TypeExpr, kind: LeqKind) -> bool {
    match kind {
        LeqKind::Meet => t.is_basic_intersection(),
        LeqKind::Join => t.is_basic_union(),
    }
}

fn arrow_parts(t: &TypeExpr) -> Option<(&TypeExpr, &TypeExpr)> {
    match t {
        TypeExpr::Arrow(l, r) => Some((l, r)),
        _ => None,
    }
}

/// Above this many assignments the arrow schema is searched greedily.
const EXHAUSTIVE_LIMIT: usize = 4096;

/// Decides `lhs ≤ rhs` and returns the proof with the smallest `e` set;
/// ties go to the earliest components.
pub fn leq(lhs: &TypeExpr, rhs: &TypeExpr, kind: LeqKind) -> Result<LeqProof, LeqError> {
    for t in [lhs, rhs] {
        if !in_stratum(t, kind) {
            return Err(LeqError::StrataMismatch(t.to_string()));
        }
    }
    search(lhs, rhs, kind).ok_or_else(|| LeqError::NotRelated { lhs: lhs.to_string(), rhs: rhs.to_string() })
}

/// `leq` where a stratum mismatch simply means no proof. Equal types are
/// related whatever their stratum.
pub fn try_leq(lhs: &TypeExpr, rhs: &TypeExpr, kind: LeqKind) -> Option<LeqProof> {
    if lhs == rhs {
        Some(LeqProof::leaf(kind, lhs, rhs, LeqRule::Reflexivity))
    } else if in_stratum(lhs, kind) && in_stratum(rhs, kind) {
        search(lhs, rhs, kind)
    } else {
        None
    }
}

fn search(lhs: &TypeExpr, rhs: &TypeExpr, kind: LeqKind) -> Option<LeqProof> {
    if lhs == rhs {
        return Some(LeqProof::leaf(kind, lhs, rhs, LeqRule::Reflexivity));
    }
    let ls = components(lhs, kind);
    let rs = components(rhs, kind);
    // The atom schemas: the smaller side contains an atom and its
    // components all occur on the larger side.
    let (small, large) = match kind {
        LeqKind::Meet => (&rs, &ls),
        LeqKind::Join => (&ls, &rs),
    };
    if small.iter().any(TypeExpr::is_atom) && small.iter().all(|c| large.contains(c)) {
        let rule = match kind {
            LeqKind::Meet => LeqRule::MeetAtom,
            LeqKind::Join => LeqRule::JoinAtom,
        };
        return Some(LeqProof::leaf(kind, lhs, rhs, rule));
    }
    arrow_schema(lhs, rhs, &ls, &rs, kind)
}

/// Candidate for one covered component: the covering index and the two child proofs.
type Cand = (usize, LeqProof, LeqProof);

fn arrow_schema(lhs: &TypeExpr, rhs: &TypeExpr, ls: &[TypeExpr], rs: &[TypeExpr], kind: LeqKind) -> Option<LeqProof> {
    // For meets every rhs component is covered by some lhs component; for
    // joins every lhs component is sent to some rhs component.
    let (covered, covering) = match kind {
        LeqKind::Meet => (rs, ls),
        LeqKind::Join => (ls, rs),
    };
    if !covered.iter().all(|c| arrow_parts(c).is_some()) {
        return None;
    }
    let mut cands: Vec<Vec<Cand>> = Vec::with_capacity(covered.len());
    for c in covered {
        let mut opts = Vec::new();
        for (j, d) in covering.iter().enumerate() {
            let Some((dl, dr)) = arrow_parts(d) else { continue };
            let (cl, cr) = arrow_parts(c).unwrap();
            // Meet: covered ν→κ, covering μ→χ; need ν ≤∧ μ and χ ≤∨ κ.
            // Join: covered μ→χ, covering ν→κ; same two conditions.
            let (nu, mu, chi, kappa) = match kind {
                LeqKind::Meet => (cl, dl, dr, cr),
                LeqKind::Join => (dl, cl, cr, dr),
            };
            if let (Some(p1), Some(p2)) = (try_leq(nu, mu, LeqKind::Meet), try_leq(chi, kappa, LeqKind::Join)) {
                opts.push((j, p1, p2));
            }
        }
        if opts.is_empty() {
            return None;
        }
        cands.push(opts);
    }
    let total: usize = cands.iter().try_fold(1usize, |acc, o| acc.checked_mul(o.len())).unwrap_or(usize::MAX);
    let choice: Vec<usize> = if total <= EXHAUSTIVE_LIMIT {
        let mut best: Option<(usize, Vec<usize>)> = None;
        let mut idx = vec![0usize; cands.len()];
        'outer: loop {
            let size = assemble_e(&cands, &idx, covering.len()).len();
            if best.as_ref().is_none_or(|(b, _)| size < *b) {
                best = Some((size, idx.clone()));
            }
            let mut k = idx.len();
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < cands[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        best.unwrap().1
    } else {
        cands
            .iter()
            .map(|opts| {
                (0..opts.len())
                    .min_by_key(|&o| (opts[o].1.e.len() + opts[o].2.e.len(), o))
                    .unwrap()
            })
            .collect()
    };
    let e = assemble_e(&cands, &choice, covering.len());
    let used: std::collections::BTreeSet<usize> = choice.iter().zip(&cands).map(|(&o, c)| c[o].0).collect();
    let extra = used.len() < covering.len();
    let mut children = Vec::new();
    let mut pairing = Vec::new();
    for (i, (&o, opts)) in choice.iter().zip(&cands).enumerate() {
        let (j, p1, p2) = &opts[o];
        children.push((p1.clone(), p2.clone()));
        pairing.push(match kind {
            LeqKind::Meet => (*j, i),
            LeqKind::Join => (i, *j),
        });
    }
    let rule = match kind {
        LeqKind::Meet => LeqRule::MeetArrow,
        LeqKind::Join => LeqRule::JoinArrow,
    };
    Some(LeqProof { kind, lhs: lhs.clone(), rhs: rhs.clone(), rule, extra, children, pairing, e })
}

fn assemble_e(cands: &[Vec<Cand>], choice: &[usize], n_covering: usize) -> PathSet {
    let mut out = PathSet::new();
    let mut used = std::collections::BTreeSet::new();
    for (&o, opts) in choice.iter().zip(cands) {
        let (j, p1, p2) = &opts[o];
        used.insert(*j);
        out.extend(prefix_all(Dir::L, &p1.e));
        out.extend(prefix_all(Dir::R, &p2.e));
    }
    if out.is_empty() && used.len() < n_covering {
        out.insert(DPath::empty());
    }
    out
}
