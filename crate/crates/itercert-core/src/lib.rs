//! Data-driven certification of iterative solvers on parametric problem
//! families.
//!
//! Given samples `x_1, ..., x_N` of a problem parameter and, for each sample,
//! a recorded scalar cost — typically the iteration count `n(x_i)` a solver
//! needed to converge, or the value of a performance metric after a fixed
//! iteration budget — this crate
//!
//! * solves the robust and relaxed scenario programs over those recordings
//!   ([`scenario`]), learning an iteration budget or metric bound together
//!   with the number of samples it leaves uncovered,
//! * attaches probabilistic generalization guarantees to the learned
//!   quantities by inverting the corresponding risk-bound equations
//!   ([`bounds`]),
//! * reproduces a complete data-generation pipeline for a constrained
//!   linear-quadratic control family solved with an in-house
//!   operator-splitting QP solver ([`mpc`]), and
//! * verifies the probabilistic statements empirically on synthetic
//!   distributions with exactly computable risk ([`validation`]).
//!
//! Everything in this crate is pure, deterministic computation: identical
//! inputs produce bit-identical outputs regardless of threading or call
//! order. The crate is `no_std`-compatible (with `alloc`); all IO, file
//! formats and the command-line surface live in the companion `itercert`
//! crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod bounds;
pub mod mpc;
pub mod scenario;
pub mod validation;

mod math;
mod rng;
