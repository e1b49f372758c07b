//! Simulation and verification toolkit for continuous-time Markov chains with
//! log-linear interaction on a finite graph, and for their scaling limit: a
//! system of interacting Ornstein-Uhlenbeck processes reflected at the origin.
//!
//! The crate is organised around the objects it simulates:
//!
//! * [`graph`] — finite undirected graphs, spectral radius, critical
//!   interaction strength;
//! * [`model`] — model parameters and all transition-rate functions,
//!   including the scaled chain;
//! * [`ctmc`] — exact event-driven simulation (Gillespie direct method),
//!   generator matrices and stationary-law oracles;
//! * [`skorohod`] — the one-dimensional reflection map on sampled paths;
//! * [`sde`] — Euler-Maruyama integration of the reflected diffusion;
//! * [`stationary`] — closed-form stationary objects: log-weights, detailed
//!   balance, the limit density and its sampler;
//! * [`harness`] — end-to-end convergence experiments, distance metrics and
//!   machine-readable reports.
//!
//! All randomness flows through seeded [`rng`] streams: the same seed gives
//! byte-identical results regardless of thread count.

pub mod ctmc;
pub mod error;
pub mod graph;
pub mod harness;
pub mod model;
pub mod rng;
pub mod sde;
pub mod skorohod;
pub mod stationary;

pub use ctmc::{DistributionTable, Trajectory};
pub use error::{Error, Result};
pub use graph::Graph;
pub use model::{ChainState, Mode, ModelParams};
pub use sde::{DiffusionPath, DiffusionSpec};
pub use skorohod::{ReflectionSolution, SampledPath};

/// Serialize a float with 17 significant digits so that CSV output
/// round-trips exactly and reruns are byte-identical.
pub fn format_f64(x: f64) -> String {
    format!("{:.16e}", x)
}
