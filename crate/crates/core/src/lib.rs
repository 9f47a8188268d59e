//! Exact enumeration toolkit for rank-metric codes and rank-metric lattices.
//!
//! Everything is computed by brute force over small finite fields with exact
//! integer and rational arithmetic:
//!
//! * [`field`]: `F_q ⊂ F_{q^m}` with Frobenius, norm, trace and coordinates.
//! * [`linalg`]: matrices, canonical subspaces, subspace enumeration, q-binomials.
//! * [`qpoly`]: linearized polynomials in one or several variables.
//! * [`code`]: rank-metric codes, MRD tests, code families and idealizers.
//! * [`geometry`]: linear sets on the projective line and hyperovals.
//! * [`lattice`]: rank-metric lattices, Möbius values and Whitney numbers.
//! * [`census`]: exhaustive code counts, counting formulas and densities.

pub mod census;
pub mod code;
pub mod error;
pub mod field;
pub mod geometry;
pub mod lattice;
pub mod linalg;
pub mod qpoly;

pub use error::{Error, Result};
