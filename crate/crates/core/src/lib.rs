//! Minimum vertex cover on k-partite k-uniform hypergraphs.
//!
//! The crate bundles an exact-rational LP relaxation with threshold
//! rounding and a branch-and-bound exact solver, the Aharoni–Holzman–
//! Krivelevich integrality-gap instances, shifting and cross-intersection
//! tools for set families under biased measures, a layered label-cover
//! model, and the biased Long Code reduction with its decoding pipeline.

pub mod gapgen;
pub mod hypergraph;
pub mod optimize;
pub mod pcp;
pub mod rational;
pub mod reduction;
pub mod setfam;

pub use hypergraph::{
    CoverCertificate, FractionalSolution, IndependentSetCertificate, PartiteHypergraph, Violation,
};
pub use rational::Rational;
