//! Belief Behavior Trees.
//!
//! A Behavior Tree whose conditions may be unknown (reported as `R`) and whose
//! actions have probabilistic outcomes. The crate provides:
//!
//! - [`tree`]: tree structure, latching and node bookkeeping.
//! - [`classic`]: single-state execution with sampled outcomes (Monte Carlo).
//! - [`belief`]: discrete distributions over physical states.
//! - [`exec`]: belief-space ticking and exhaustive self-simulation.
//! - [`planner`]: iterative tree synthesis towards a target success probability.
//! - [`domain`]: the domain-definition language, grounding and templates.
//! - [`treefile`] and [`dot`]: tree serialization and Graphviz export.
//! - [`cli`]: the `bbt` command-line front end.

pub mod belief;
pub mod classic;
pub mod cli;
pub mod domain;
pub mod dot;
mod error;
pub mod exec;
pub mod planner;
mod status;
pub mod tree;
pub mod treefile;

pub use error::{Error, Result};
pub use status::Status;

/// Tolerance used for probability-mass comparisons.
pub const MASS_EPSILON: f64 = 1e-12;
