//! Simulation and moment oracles for the hyperbolic Anderson model in one
//! space dimension driven by a finite-activity pure-jump Lévy noise.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod fields;
pub mod levy;
pub mod metrics;
pub mod output;
pub mod parallel;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod stats;

pub use error::{LabError, Result};
