//! Perturbative algorithm configuration.
//!
//! The crate provides the ParamRLS, ParamHS and ParamILS configurators with
//! pluggable mutation operators (ℓ-step, uniform random with or without
//! replacement, harmonic step), the target algorithms and benchmark functions
//! they tune, exact and cached quality landscapes with an approximate
//! unimodality checker, a SAPS MAX-SAT solver, and the statistics used to
//! compare operators.
//!
//! Every configurator run counts its calls to `better()`, the comparison
//! primitive, and records when an optimal configuration is first sampled.

pub mod configurators;
pub mod error;
pub mod experiments;
pub mod landscape;
pub mod operators;
pub mod rng;
pub mod sat;
pub mod space;
pub mod stats;
pub mod targets;

pub use error::{Error, Result};
pub use space::{l1_distance, Configuration, ParameterDim, ParameterSpace};
