//! Exact computation of the goal value of Boolean functions.
//!
//! A goal function for `f` is a monotone, submodular utility on partial
//! assignments that reaches its maximum `Q` exactly on the assignments
//! containing a certificate of `f`; the goal value `Γ(f)` is the least such
//! `Q`. This crate verifies and constructs goal functions, computes `Γ`,
//! `Γ⁰` and `Γ¹` with an exact integer program, and implements the
//! surrounding constructions: read-once closed forms, rank-bounded decision
//! trees, and adaptive greedy evaluation.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]

extern crate alloc;

pub mod boolfn;
pub mod constructions;
pub mod dtree;
pub mod error;
pub mod evalsim;
pub mod ilp;
pub mod passign;
pub mod rational;
pub mod readonce;
pub mod utility;

pub use error::{Error, Result};
