//! Exact-arithmetic engine for rectangle graphs attached to a set of
//! tangential sites.
//!
//! Given `m` sites in `Q^n`, the crate constructs the geometric rectangle
//! graph on lattice windows, checks and samples genericity constraints,
//! enumerates the combinatorial graphs living in the Cayley graph of
//! `Z^m ⋊ Z/2`, lifts geometric components to combinatorial ones, solves the
//! realization systems exactly, produces resonance certificates, and runs the
//! exhaustive degeneracy analysis (encoding graphs, circuit parity, minimal
//! relations, index typing, allowability).
//!
//! All arithmetic is exact rational; nothing here rounds.

pub mod comb;
pub mod constraints;
pub mod degeneracy;
pub mod error;
pub mod export;
pub mod geometry;
pub mod group;
pub mod linalg;
pub mod quadform;
pub mod ratvec;
pub mod realization;
pub mod scalar;
pub mod sites;

pub use error::Error;
pub use group::{EdgeLabel, GroupElement, IntVector, Sign};
pub use quadform::QuadForm;
pub use scalar::Scalar;
pub use sites::SiteSet;
