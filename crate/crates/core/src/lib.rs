//! Spectral gap of the weakly asymmetric exclusion process on a ring at half filling.
//!
//! The crate bundles a brute-force Markov-matrix oracle, a finite-size Bethe
//! ansatz solver, the large-size edge-root equations, scaling-limit
//! extrapolation and an exact perturbative series for the gap in the
//! asymmetry parameter.

pub mod bethe_finite;
pub mod edge;
pub mod markov_oracle;
pub mod numerics;
pub mod scaling;
pub mod series;

pub use numerics::{BigComplex, NumericsError, PrecisionContext};
