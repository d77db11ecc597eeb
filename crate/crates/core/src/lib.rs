//! Isomorphism of intersection and union types.
//!
//! Types are normalised by a rewriting system whose steps are witnessed by
//! finite hereditary identities. Two types whose normal forms agree up to
//! associativity and commutativity at top level are isomorphic, and the
//! composed witnesses are checked derivations in a relevant typing system.

pub mod cli;
pub mod derive;
pub mod iso;
pub mod lambda;
pub mod paths;
pub mod preorder;
pub mod rewrite;
pub mod syntax;
pub mod type_core;
pub mod witness;

pub use type_core::TypeExpr;
