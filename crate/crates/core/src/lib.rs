//! Exact computation of relative K-groups of truncated free algebras
//! through big Witt vectors on truncation posets, with a simplicial
//! homology oracle and a rational-rank engine.

pub mod abgroup;
pub mod cli;
pub mod homology;
pub mod rational;
pub mod trunc;
pub mod witt;
pub mod wittfp;
pub mod words;
