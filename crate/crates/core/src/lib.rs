//! Exact GF(2) homological algebra for Dehn-surgery computations.
//!
//! The crate computes `HF-hat` of `p/q`-surgery on a knot in a homology
//! sphere from a small algebraic package (a *knot system*): the three
//! homology groups `H_inf`, `H_1`, `H_0` and the four comparison maps
//! `phi`, `phibar`, `psi`, `psibar` between them. Three independent
//! constructions are provided and cross-checked against each other:
//!
//! - the rational surgery complex built directly from the knot system
//!   ([`surgery::build_rational`]),
//! - the integer zig-zag complex ([`surgery::build_zigzag`]),
//! - the chain-level splice of the knot complement with an explicit
//!   solid-torus model ([`surgery::build_splice`] fed by [`lensmodel`]).
//!
//! Everything is exact arithmetic over GF(2); homology groups are
//! reported as dimensions.

pub mod chain;
pub mod f2linalg;
pub mod fuzz;
pub mod knotsys;
pub mod lensmodel;
pub mod surgery;

pub use f2linalg::BitMatrix;
