//! Verification toolkit for operator classes on semi-Hilbertian spaces.
//!
//! A positive semidefinite matrix `A` induces the semi-inner product
//! `<h|k>_A = <Ah|k>` and with it a calculus of A-adjoints, A-seminorms and
//! operator classes such as the (n,m)-A-normal and (n,m)-A-quasinormal
//! families. This crate provides:
//!
//! * [`numerics`]: dense complex kernels (pseudo-inverse, range projectors,
//!   PSD square roots, commutators) with an explicit tolerance policy,
//! * [`semihilbert`]: the metric context and A-adjoint constructions,
//! * [`classes`]: residual-based membership predicates for the operator
//!   classes,
//! * [`shiftcalc`]: exact rational verdicts for weighted shifts with
//!   eventually periodic data,
//! * [`lab`]: seeded instance generators, a registry of implication checks,
//!   and a counterexample search,
//! * [`files`] / [`report`]: the JSON wire formats used by the CLI.

pub mod classes;
pub mod files;
pub mod lab;
pub mod numerics;
pub mod report;
pub mod semihilbert;
pub mod shiftcalc;
