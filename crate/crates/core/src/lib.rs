//! Exact computations on the region of attainable (Spearman's footrule,
//! Spearman's rho) pairs.
//!
//! The crate is `no_std` (with `alloc`). Every statistic is an exact
//! [`Rational`](exactnum::Rational); the only irrational quantities, the
//! `3/2`-powers in the bound curves, are compared in squared form.
//!
//! - [`exactnum`]: rationals, square-root sign decisions, step functions and
//!   the rearrangement inequality check.
//! - [`shuffles`]: permutations, closed-form footrule/rho of shuffles,
//!   involution enumeration.
//! - [`segmeasures`]: copulas supported on weighted line segments, exact
//!   CDF and measures, midpoint quadrature oracle.
//! - [`diagonals`]: piecewise-linear diagonals, diagonal copulas, their
//!   Markov kernels and the correspondence with symmetric shuffles.
//! - [`rearrange`]: displacement vectors, the objective `m` and the mass
//!   rearrangement onto the canonical shuffle classes.
//! - [`families`]: `C_alpha`, the interpolating diagonals and ordinal sums.
//! - [`bounds`]: the bound curves, `r`, `s`, and region verdicts.

#![no_std]

extern crate alloc;

pub mod bounds;
pub mod diagonals;
pub mod exactnum;
pub mod families;
pub mod rearrange;
pub mod segmeasures;
pub mod shuffles;

pub use exactnum::{q, Rational};
