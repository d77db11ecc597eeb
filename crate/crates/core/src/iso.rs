//! Isomorphism of types through normal forms.
//!
//! Equal normal forms (up to reordering at defined paths) give a witnessed
//! isomorphism. Normal forms whose intersection/union counts differ are
//! refuted. Anything else is reported as unknown.

use crate::rewrite::{ac_canonical_trace, is_normal_with, normalize_with, RewriteConfig, RewriteError, Strategy};
use crate::type_core::TypeExpr;
use crate::witness::{chain, witness_trace, WitnessError, WitnessPair};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("{0} is not in normal form")]
    NotNormal(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// Number of top-level conjuncts and the sorted multiset of their widths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    pub conjuncts: usize,
    pub widths: Vec<usize>,
}

impl Profile {
    pub fn of_matrix(m: &[Vec<TypeExpr>]) -> Profile {
        let mut widths: Vec<usize> = m.iter().map(Vec::len).collect();
        widths.sort_unstable();
        Profile { conjuncts: m.len(), widths }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MismatchReport {
    pub normal_a: TypeExpr,
    pub normal_b: TypeExpr,
    pub profile_a: Profile,
    pub profile_b: Profile,
}

impl MismatchReport {
    pub fn reason(&self) -> String {
        if self.profile_a.conjuncts != self.profile_b.conjuncts {
            format!("{} conjuncts against {}", self.profile_a.conjuncts, self.profile_b.conjuncts)
        } else {
            format!("union widths {:?} against {:?}", self.profile_a.widths, self.profile_b.widths)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownReport {
    pub normal_a: TypeExpr,
    pub normal_b: TypeExpr,
    pub canonical_a: TypeExpr,
    pub canonical_b: TypeExpr,
    pub profile: Profile,
    /// For each conjunct of `a`, the conjuncts of `b` with the same width.
    pub pairing: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub enum IsoVerdict {
    Isomorphic(Box<WitnessPair>),
    NotIsomorphic(MismatchReport),
    Unknown(UnknownReport),
}

impl IsoVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            IsoVerdict::Isomorphic(_) => "Isomorphic",
            IsoVerdict::NotIsomorphic(_) => "NotIsomorphic",
            IsoVerdict::Unknown(_) => "Unknown",
        }
    }
}

/// The conjuncts of a normal type, each as its list of disjuncts, in written order.
pub fn decompose_normal(t: &TypeExpr) -> Result<Vec<Vec<TypeExpr>>, IsoError> {
    decompose_normal_with(t, &RewriteConfig::default())
}

pub fn decompose_normal_with(t: &TypeExpr, cfg: &RewriteConfig) -> Result<Vec<Vec<TypeExpr>>, IsoError> {
    if !is_normal_with(t, cfg)? {
        return Err(IsoError::NotNormal(t.to_string()));
    }
    Ok(matrix(t))
}

fn matrix(t: &TypeExpr) -> Vec<Vec<TypeExpr>> {
    t.and_components().iter().map(TypeExpr::or_components).collect()
}

pub fn isomorphic(a: &TypeExpr, b: &TypeExpr) -> Result<IsoVerdict, IsoError> {
    isomorphic_with(a, b, Strategy::LeftmostOutermost, &RewriteConfig::default())
}

pub fn isomorphic_with(a: &TypeExpr, b: &TypeExpr, strategy: Strategy, cfg: &RewriteConfig) -> Result<IsoVerdict, IsoError> {
    let (na, ta) = normalize_with(a, strategy, cfg)?;
    let (nb, tb) = normalize_with(b, strategy, cfg)?;
    let (ca, ac_a) = ac_canonical_trace(&na);
    let (cb, ac_b) = ac_canonical_trace(&nb);
    if ca == cb {
        let parts = [
            witness_trace(a, &ta)?,
            witness_trace(&na, &ac_a)?,
            witness_trace(&nb, &ac_b)?.inverse(),
            witness_trace(b, &tb)?.inverse(),
        ];
        let parts: Vec<WitnessPair> = parts.into_iter().filter(|p| p.source != p.target).collect();
        let w = chain(a, &parts)?;
        w.check()?;
        return Ok(IsoVerdict::Isomorphic(Box::new(w)));
    }
    let (ma, mb) = (matrix(&na), matrix(&nb));
    let (pa, pb) = (Profile::of_matrix(&ma), Profile::of_matrix(&mb));
    if pa != pb {
        return Ok(IsoVerdict::NotIsomorphic(MismatchReport { normal_a: na, normal_b: nb, profile_a: pa, profile_b: pb }));
    }
    let pairing = ma.iter().map(|ra| (0..mb.len()).filter(|&j| mb[j].len() == ra.len()).collect()).collect();
    Ok(IsoVerdict::Unknown(UnknownReport { normal_a: na, normal_b: nb, canonical_a: ca, canonical_b: cb, profile: pa, pairing }))
}
