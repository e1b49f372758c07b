//! Model parameters and transition-rate functions.
//!
//! A state assigns to every vertex an occupation number in `0..=N`. Births at
//! vertex `v` happen at a log-linear rate in the state of `v` and its
//! neighbours, deaths at unit rate; the `DeathInteraction` variant moves the
//! interaction term into the death rate instead. Both variants share the same
//! stationary law (see [`crate::stationary`]).

use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};

/// Where the interaction enters the rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Births at `exp(alpha x_v + beta (Ax)_v)`, deaths at rate 1.
    ArrivalInteraction,
    /// Births at `exp(alpha x_v)`, deaths at `exp(-beta (Ax)_v)`.
    DeathInteraction,
}

/// Occupation numbers per vertex, each in `0..=N`.
pub type ChainState = Vec<u32>;

/// Parameters of the interacting birth-death chain.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    /// Per-vertex capacity `N`.
    pub capacity: u32,
    pub mode: Mode,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, capacity: u32, mode: Mode) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Argument("capacity must be at least 1".into()));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Argument("alpha and beta must be finite".into()));
        }
        Ok(Self {
            alpha,
            beta,
            capacity,
            mode,
        })
    }

    /// Parameters of the `n`-th chain in the scaling scheme: interaction
    /// divided by `n`, capacity replaced by the scheduled `capacity_n`.
    pub fn scaled(&self, n: u64, capacity_n: u32) -> Self {
        Self {
            alpha: self.alpha / n as f64,
            beta: self.beta / n as f64,
            capacity: capacity_n,
            mode: self.mode,
        }
    }
}

/// Check that `x` is a valid state for `(p, g)`.
pub fn validate_state(p: &ModelParams, g: &Graph, x: &[u32]) -> Result<()> {
    if x.len() != g.vertex_count() {
        return Err(Error::Argument(format!(
            "state length {} does not match vertex count {}",
            x.len(),
            g.vertex_count()
        )));
    }
    if let Some(v) = x.iter().position(|&c| c > p.capacity) {
        return Err(Error::Argument(format!(
            "state component {v} exceeds capacity {}",
            p.capacity
        )));
    }
    Ok(())
}

/// Integer neighbour sum `(Ax)_v`; exact, no rounding.
pub fn neighbor_sum(g: &Graph, x: &[u32], v: usize) -> u64 {
    g.neighbors(v).iter().map(|&u| u64::from(x[u])).sum()
}

/// Log of the birth rate at vertex `v` (exponent accumulated in log-space;
/// a single `exp` is taken by the caller, which avoids overflow for large
/// occupations during stress runs).
pub fn birth_log_rate(p: &ModelParams, g: &Graph, x: &[u32], v: usize) -> f64 {
    match p.mode {
        Mode::ArrivalInteraction => {
            p.alpha * f64::from(x[v]) + p.beta * neighbor_sum(g, x, v) as f64
        }
        Mode::DeathInteraction => p.alpha * f64::from(x[v]),
    }
}

/// Log of the death rate at vertex `v`.
pub fn death_log_rate(p: &ModelParams, g: &Graph, x: &[u32], v: usize) -> f64 {
    match p.mode {
        Mode::ArrivalInteraction => 0.0,
        Mode::DeathInteraction => -p.beta * neighbor_sum(g, x, v) as f64,
    }
}

/// Rate of the transition `x -> x + e_v`, without the capacity guard (the
/// guard lives in [`transition_rate`] and in the simulators; the bare rate is
/// also what the diffusion drift linearises).
pub fn birth_rate(p: &ModelParams, g: &Graph, x: &[u32], v: usize) -> f64 {
    birth_log_rate(p, g, x, v).exp()
}

/// Rate of the transition `x -> x - e_v`, without the positivity guard.
pub fn death_rate(p: &ModelParams, g: &Graph, x: &[u32], v: usize) -> f64 {
    death_log_rate(p, g, x, v).exp()
}

/// Full transition rate `r(x, y)`: birth or death rate when `y` differs from
/// `x` by one unit in one admissible coordinate, zero otherwise.
pub fn transition_rate(p: &ModelParams, g: &Graph, x: &[u32], y: &[u32]) -> f64 {
    if x.len() != y.len() {
        return 0.0;
    }
    let mut diff: Option<(usize, i64)> = None;
    for v in 0..x.len() {
        if x[v] != y[v] {
            if diff.is_some() {
                return 0.0;
            }
            diff = Some((v, i64::from(y[v]) - i64::from(x[v])));
        }
    }
    match diff {
        Some((v, 1)) if x[v] < p.capacity => birth_rate(p, g, x, v),
        Some((v, -1)) if x[v] > 0 => death_rate(p, g, x, v),
        _ => 0.0,
    }
}

/// Transition rate of the `n`-th scaled chain: `alpha`, `beta` replaced by
/// `alpha/n`, `beta/n`, capacity taken from `p.capacity` (interpreted as the
/// scheduled capacity of the scaled chain).
pub fn scaled_rate(p: &ModelParams, g: &Graph, n: u64, x: &[u32], y: &[u32]) -> f64 {
    transition_rate(&p.scaled(n, p.capacity), g, x, y)
}

/// Incrementally maintained neighbour sums for one simulation instance.
/// After a unit jump at vertex `w`, only the sums of `w`'s neighbours change,
/// so an update costs `O(deg w)` instead of a full recomputation.
#[derive(Debug, Clone)]
pub struct NeighborSums {
    sums: Vec<u64>,
}

impl NeighborSums {
    pub fn new(g: &Graph, x: &[u32]) -> Self {
        let sums = (0..g.vertex_count())
            .map(|v| neighbor_sum(g, x, v))
            .collect();
        Self { sums }
    }

    pub fn get(&self, v: usize) -> u64 {
        self.sums[v]
    }

    /// Record a jump of `delta` (+1 or -1) at vertex `w`.
    pub fn apply_jump(&mut self, g: &Graph, w: usize, delta: i64) {
        for &u in g.neighbors(w) {
            self.sums[u] = self.sums[u].checked_add_signed(delta).expect("sum underflow");
        }
    }
}
