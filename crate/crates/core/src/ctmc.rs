//! Exact event-driven simulation of the chain and brute-force stationary
//! oracles for small state spaces.
//!
//! Trajectories are generated with the Gillespie direct method: exponential
//! holding times with the total-rate parameter, events chosen proportionally
//! to the individual rates. Per-vertex rates are maintained incrementally —
//! a jump at `w` only invalidates the rates of `w` and its neighbours.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{self, Mode, ModelParams, NeighborSums};
use crate::rng::{replica_rng, Stream};
use crate::skorohod::SampledPath;
use rand::Rng;
use rand_distr::Exp1;
use std::io::Write;

/// Default per-trajectory event cap, a guard against explosive regimes.
pub const DEFAULT_EVENT_CAP: u64 = 100_000_000;

/// Default cap on `(N+1)^|V|` for the dense-generator oracles.
pub const DEFAULT_STATE_SPACE_CAP: usize = 4096;

/// A piecewise-constant trajectory: the state after each event, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    vertex_count: usize,
    capacity: u32,
    initial_state: Vec<u32>,
    times: Vec<f64>,
    states: Vec<u32>,
    horizon: f64,
}

impl Trajectory {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn event_count(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn initial_state(&self) -> &[u32] {
        &self.initial_state
    }

    /// State after event `i`.
    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i * self.vertex_count..(i + 1) * self.vertex_count]
    }

    pub fn final_state(&self) -> &[u32] {
        if self.times.is_empty() {
            &self.initial_state
        } else {
            self.state(self.times.len() - 1)
        }
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// State at time `t` (piecewise-constant, right-continuous).
    pub fn state_at_time(&self, t: f64) -> &[u32] {
        let idx = self.times.partition_point(|&ti| ti <= t);
        if idx == 0 {
            &self.initial_state
        } else {
            self.state(idx - 1)
        }
    }

    /// CSV dump: header `t,v0,...`, an initial row at t=0, then one row per
    /// event with the post-event state.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t")?;
        for v in 0..self.vertex_count {
            write!(w, ",v{v}")?;
        }
        writeln!(w)?;
        let mut row = |t: f64, state: &[u32]| -> Result<()> {
            write!(w, "{}", crate::format_f64(t))?;
            for &c in state {
                write!(w, ",{c}")?;
            }
            writeln!(w)?;
            Ok(())
        };
        row(0.0, &self.initial_state)?;
        for i in 0..self.times.len() {
            row(self.times[i], self.state(i))?;
        }
        Ok(())
    }
}

/// Explicit probability vector over the full state space `{0..=N}^V`,
/// enumerated in mixed radix with vertex 0 least significant.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    vertex_count: usize,
    capacity: u32,
    probs: Vec<f64>,
}

/// Checked `(capacity+1)^vertex_count`, guarded by `cap`.
pub fn state_space_size(vertex_count: usize, capacity: u32, cap: usize) -> Result<usize> {
    let base = capacity as usize + 1;
    let mut size: usize = 1;
    for _ in 0..vertex_count {
        size = size
            .checked_mul(base)
            .filter(|&s| s <= cap)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "state space ({base}^{vertex_count}) exceeds the cap of {cap} states"
                ))
            })?;
    }
    Ok(size)
}

impl DistributionTable {
    pub fn new(vertex_count: usize, capacity: u32, probs: Vec<f64>) -> Result<Self> {
        let expected = state_space_size(vertex_count, capacity, usize::MAX)?;
        if probs.len() != expected {
            return Err(Error::Argument(format!(
                "table needs {expected} entries, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::Argument("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self {
            vertex_count,
            capacity,
            probs,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn state_count(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn index_of(&self, x: &[u32]) -> usize {
        state_index(x, self.capacity)
    }

    pub fn state_at(&self, index: usize) -> Vec<u32> {
        decode_state(index, self.vertex_count, self.capacity)
    }

    pub fn prob_of(&self, x: &[u32]) -> f64 {
        self.probs[self.index_of(x)]
    }

    /// True when two tables enumerate the same state space.
    pub fn same_enumeration(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.capacity == other.capacity
    }

    /// CSV dump: `state_index,x0,...,prob`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "state_index")?;
        for v in 0..self.vertex_count {
            write!(w, ",x{v}")?;
        }
        writeln!(w, ",prob")?;
        for (i, &p) in self.probs.iter().enumerate() {
            write!(w, "{i}")?;
            for c in self.state_at(i) {
                write!(w, ",{c}")?;
            }
            writeln!(w, ",{}", crate::format_f64(p))?;
        }
        Ok(())
    }
}

pub(crate) fn state_index(x: &[u32], capacity: u32) -> usize {
    let base = capacity as usize + 1;
    x.iter()
        .rev()
        .fold(0usize, |acc, &c| acc * base + c as usize)
}

pub(crate) fn decode_state(index: usize, vertex_count: usize, capacity: u32) -> Vec<u32> {
    let base = capacity as usize + 1;
    let mut rem = index;
    (0..vertex_count)
        .map(|_| {
            let c = (rem % base) as u32;
            rem /= base;
            c
        })
        .collect()
}

/// One running chain: state, cached neighbour sums, cached per-vertex rates.
struct ChainSim<'a> {
    p: &'a ModelParams,
    g: &'a Graph,
    x: Vec<u32>,
    sums: NeighborSums,
    birth: Vec<f64>,
    death: Vec<f64>,
    t: f64,
    rng: Stream,
}

impl<'a> ChainSim<'a> {
    fn new(p: &'a ModelParams, g: &'a Graph, x0: &[u32], rng: Stream) -> Result<Self> {
        model::validate_state(p, g, x0)?;
        let mut sim = Self {
            p,
            g,
            x: x0.to_vec(),
            sums: NeighborSums::new(g, x0),
            birth: vec![0.0; g.vertex_count()],
            death: vec![0.0; g.vertex_count()],
            t: 0.0,
            rng,
        };
        for v in 0..g.vertex_count() {
            sim.refresh(v);
        }
        Ok(sim)
    }

    /// Recompute the guarded rates of vertex `v` from the cached sums.
    fn refresh(&mut self, v: usize) {
        let xv = self.x[v];
        self.birth[v] = if xv < self.p.capacity {
            let log_rate = match self.p.mode {
                Mode::ArrivalInteraction => {
                    self.p.alpha * f64::from(xv) + self.p.beta * self.sums.get(v) as f64
                }
                Mode::DeathInteraction => self.p.alpha * f64::from(xv),
            };
            log_rate.exp()
        } else {
            0.0
        };
        self.death[v] = if xv > 0 {
            match self.p.mode {
                Mode::ArrivalInteraction => 1.0,
                Mode::DeathInteraction => (-self.p.beta * self.sums.get(v) as f64).exp(),
            }
        } else {
            0.0
        };
    }

    fn total_rate(&self) -> f64 {
        self.birth.iter().sum::<f64>() + self.death.iter().sum::<f64>()
    }

    /// Advance to the next event unless it would land past `horizon`.
    /// Returns the event time; the state is already updated on return.
    fn step_until(&mut self, horizon: f64) -> Option<f64> {
        let total = self.total_rate();
        debug_assert!(total > 0.0, "total rate must stay positive");
        let wait: f64 = self.rng.sample::<f64, _>(Exp1) / total;
        if self.t + wait > horizon {
            return None;
        }
        self.t += wait;
        let mut u: f64 = self.rng.random::<f64>() * total;
        // scan births then deaths in vertex order; remember the last positive
        // rate as a guard against float fall-through
        let n = self.x.len();
        let mut chosen: (usize, i64) = (usize::MAX, 0);
        for v in 0..n {
            if self.birth[v] > 0.0 {
                chosen = (v, 1);
                if u < self.birth[v] {
                    u = -1.0;
                    break;
                }
                u -= self.birth[v];
            }
        }
        if u >= 0.0 {
            for v in 0..n {
                if self.death[v] > 0.0 {
                    chosen = (v, -1);
                    if u < self.death[v] {
                        break;
                    }
                    u -= self.death[v];
                }
            }
        }
        let (w, delta) = chosen;
        debug_assert!(w != usize::MAX);
        self.x[w] = self.x[w].checked_add_signed(delta as i32).expect("state bounds");
        self.sums.apply_jump(self.g, w, delta);
        self.refresh(w);
        for i in 0..self.g.neighbors(w).len() {
            let u = self.g.neighbors(w)[i];
            self.refresh(u);
        }
        Some(self.t)
    }
}

/// Drive a chain until `horizon` or `max_events`, reporting each post-event
/// state to `on_event`. Returns the number of events.
pub(crate) fn run_chain(
    p: &ModelParams,
    g: &Graph,
    x0: &[u32],
    horizon: f64,
    max_events: u64,
    cap_is_error: bool,
    rng: Stream,
    mut on_event: impl FnMut(f64, &[u32]),
) -> Result<u64> {
    if !(horizon >= 0.0) {
        return Err(Error::Argument("horizon must be nonnegative".into()));
    }
    let mut sim = ChainSim::new(p, g, x0, rng)?;
    let mut events = 0u64;
    while events < max_events {
        match sim.step_until(horizon) {
            None => return Ok(events),
            Some(t) => {
                events += 1;
                on_event(t, &sim.x);
            }
        }
    }
    if cap_is_error {
        Err(Error::Resource(format!(
            "event cap of {max_events} reached before the horizon {horizon}"
        )))
    } else {
        Ok(events)
    }
}

/// Simulate the chain from `x0` up to `horizon`. Deterministic given `seed`.
pub fn simulate(
    p: &ModelParams,
    g: &Graph,
    x0: &[u32],
    horizon: f64,
    event_cap: u64,
    seed: u64,
) -> Result<Trajectory> {
    let vertex_count = g.vertex_count();
    let mut times = Vec::new();
    let mut states = Vec::new();
    run_chain(p, g, x0, horizon, event_cap, true, replica_rng(seed, 0), |t, x| {
        times.push(t);
        states.extend_from_slice(x);
    })?;
    Ok(Trajectory {
        vertex_count,
        capacity: p.capacity,
        initial_state: x0.to_vec(),
        times,
        states,
        horizon,
    })
}

/// Simulate until exactly `max_events` events have happened; the trajectory
/// horizon is the time of the last event.
pub fn simulate_for_events(
    p: &ModelParams,
    g: &Graph,
    x0: &[u32],
    max_events: u64,
    seed: u64,
) -> Result<Trajectory> {
    let vertex_count = g.vertex_count();
    let mut times = Vec::new();
    let mut states = Vec::new();
    run_chain(
        p,
        g,
        x0,
        f64::INFINITY,
        max_events,
        false,
        replica_rng(seed, 0),
        |t, x| {
            times.push(t);
            states.extend_from_slice(x);
        },
    )?;
    let horizon = times.last().copied().unwrap_or(0.0);
    Ok(Trajectory {
        vertex_count,
        capacity: p.capacity,
        initial_state: x0.to_vec(),
        times,
        states,
        horizon,
    })
}

/// Upper bound on the total jump rate of the scaled chain, used to predict
/// the event count before committing to a run.
fn max_total_rate(p: &ModelParams, g: &Graph) -> f64 {
    let cap = f64::from(p.capacity);
    let degrees = g.degrees();
    (0..g.vertex_count())
        .map(|v| {
            let d = degrees[v] as f64;
            let (birth_exp, death_exp) = match p.mode {
                Mode::ArrivalInteraction => {
                    (p.alpha.max(0.0) * cap + p.beta.max(0.0) * d * cap, 0.0)
                }
                Mode::DeathInteraction => {
                    (p.alpha.max(0.0) * cap, (-p.beta).max(0.0) * d * cap)
                }
            };
            birth_exp.exp() + death_exp.exp()
        })
        .sum()
}

/// Simulate the `n`-th scaled chain (capacity `capacity_n`, rates with
/// `alpha/n`, `beta/n`) up to physical time `n * horizon_scaled`. The
/// trajectory is stored in physical time; refuse to start when the predicted
/// event count exceeds `event_cap`.
pub fn simulate_scaled(
    p: &ModelParams,
    g: &Graph,
    n: u64,
    capacity_n: u32,
    x0: &[u32],
    horizon_scaled: f64,
    event_cap: u64,
    seed: u64,
) -> Result<Trajectory> {
    let scaled = p.scaled(n, capacity_n);
    let horizon = n as f64 * horizon_scaled;
    let expected = horizon * max_total_rate(&scaled, g);
    if expected > event_cap as f64 {
        return Err(Error::Resource(format!(
            "expected event count {expected:.3e} exceeds the cap of {event_cap}"
        )));
    }
    simulate(&scaled, g, x0, horizon, event_cap, seed)
}

/// Final state of a scaled run, without storing the path.
pub fn simulate_scaled_endpoint(
    p: &ModelParams,
    g: &Graph,
    n: u64,
    capacity_n: u32,
    x0: &[u32],
    horizon_scaled: f64,
    event_cap: u64,
    seed: u64,
) -> Result<Vec<u32>> {
    let scaled = p.scaled(n, capacity_n);
    let horizon = n as f64 * horizon_scaled;
    let expected = horizon * max_total_rate(&scaled, g);
    if expected > event_cap as f64 {
        return Err(Error::Resource(format!(
            "expected event count {expected:.3e} exceeds the cap of {event_cap}"
        )));
    }
    let mut last = x0.to_vec();
    run_chain(&scaled, g, x0, horizon, event_cap, true, replica_rng(seed, 0), |_, x| {
        last.copy_from_slice(x);
    })?;
    Ok(last)
}

/// Endpoint of one replica of a scaled run on a caller-provided stream;
/// the replica fan-out in the harness derives one stream per index.
pub(crate) fn scaled_endpoint_on_stream(
    p: &ModelParams,
    g: &Graph,
    n: u64,
    capacity_n: u32,
    x0: &[u32],
    horizon_scaled: f64,
    event_cap: u64,
    rng: Stream,
) -> Result<Vec<u32>> {
    let scaled = p.scaled(n, capacity_n);
    let horizon = n as f64 * horizon_scaled;
    let expected = horizon * max_total_rate(&scaled, g);
    if expected > event_cap as f64 {
        return Err(Error::Resource(format!(
            "expected event count {expected:.3e} exceeds the cap of {event_cap}"
        )));
    }
    let mut last = x0.to_vec();
    run_chain(&scaled, g, x0, horizon, event_cap, true, rng, |_, x| {
        last.copy_from_slice(x);
    })?;
    Ok(last)
}

/// Sample the rescaled process `state / sqrt(n)` of one long scaled run on a
/// uniform grid: `samples` draws spaced `spacing_scaled` apart in scaled
/// time, starting after `burn_in_scaled`. Used for occupation statistics.
#[allow(clippy::too_many_arguments)]
pub fn simulate_scaled_occupation(
    p: &ModelParams,
    g: &Graph,
    n: u64,
    capacity_n: u32,
    x0: &[u32],
    burn_in_scaled: f64,
    spacing_scaled: f64,
    samples: usize,
    event_cap: u64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if samples == 0 || spacing_scaled <= 0.0 || burn_in_scaled < 0.0 {
        return Err(Error::Argument(
            "occupation sampling needs samples >= 1, positive spacing, nonnegative burn-in".into(),
        ));
    }
    let scaled = p.scaled(n, capacity_n);
    let horizon_scaled = burn_in_scaled + spacing_scaled * samples as f64;
    let horizon = n as f64 * horizon_scaled;
    let expected = horizon * max_total_rate(&scaled, g);
    if expected > event_cap as f64 {
        return Err(Error::Resource(format!(
            "expected event count {expected:.3e} exceeds the cap of {event_cap}"
        )));
    }
    let sqrt_n = (n as f64).sqrt();
    let sample_time =
        |k: usize| n as f64 * (burn_in_scaled + spacing_scaled * (k + 1) as f64);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(samples);
    let mut current = x0.to_vec();
    let mut next = 0usize;
    run_chain(&scaled, g, x0, horizon, event_cap, true, replica_rng(seed, 0), |t, x| {
        while next < samples && sample_time(next) < t {
            out.push(current.iter().map(|&c| f64::from(c) / sqrt_n).collect());
            next += 1;
        }
        current.copy_from_slice(x);
    })?;
    while next < samples {
        out.push(current.iter().map(|&c| f64::from(c) / sqrt_n).collect());
        next += 1;
    }
    Ok(out)
}

/// Rescale a trajectory of the `n`-th chain: sample `X(t) = state(n t) /
/// sqrt(n)` on a uniform grid of `points` intervals in scaled time. Returns
/// one step path per coordinate.
pub fn rescale(traj: &Trajectory, n: u64, points: usize) -> Result<Vec<SampledPath>> {
    if points == 0 {
        return Err(Error::Argument("rescale needs at least one interval".into()));
    }
    let horizon_scaled = traj.horizon() / n as f64;
    let sqrt_n = (n as f64).sqrt();
    let grid: Vec<f64> = (0..=points)
        .map(|j| horizon_scaled * j as f64 / points as f64)
        .collect();
    (0..traj.vertex_count())
        .map(|v| {
            let values = grid
                .iter()
                .map(|&s| f64::from(traj.state_at_time(n as f64 * s)[v]) / sqrt_n)
                .collect();
            SampledPath::step(grid.clone(), values)
        })
        .collect()
}

/// Dense generator matrix over the full state space, row-major.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    vertex_count: usize,
    capacity: u32,
    dim: usize,
    data: Vec<f64>,
}

impl GeneratorMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }
}

/// Assemble the generator: off-diagonal entries are transition rates, the
/// diagonal makes every row sum to zero.
pub fn generator_matrix(
    p: &ModelParams,
    g: &Graph,
    state_space_cap: usize,
) -> Result<GeneratorMatrix> {
    let vertex_count = g.vertex_count();
    let dim = state_space_size(vertex_count, p.capacity, state_space_cap)?;
    let mut data = vec![0.0; dim * dim];
    let base = p.capacity as usize + 1;
    for i in 0..dim {
        let x = decode_state(i, vertex_count, p.capacity);
        let mut row_sum = 0.0;
        let mut stride = 1usize;
        for v in 0..vertex_count {
            if x[v] < p.capacity {
                let rate = model::birth_rate(p, g, &x, v);
                data[i * dim + (i + stride)] = rate;
                row_sum += rate;
            }
            if x[v] > 0 {
                let rate = model::death_rate(p, g, &x, v);
                data[i * dim + (i - stride)] = rate;
                row_sum += rate;
            }
            stride *= base;
        }
        data[i * dim + i] = -row_sum;
    }
    Ok(GeneratorMatrix {
        vertex_count,
        capacity: p.capacity,
        dim,
        data,
    })
}

/// Stationary law of the generator: the probability vector solving
/// `pi Q = 0`, found by a dense linear solve with the normalisation row.
/// The residual is checked to 1e-10.
pub fn exact_stationary(gen: &GeneratorMatrix) -> Result<DistributionTable> {
    let dim = gen.dim;
    // Solve M pi = b where M is Q^T with the last row replaced by ones.
    let mut m = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            m[i * dim + j] = gen.data[j * dim + i];
        }
    }
    for j in 0..dim {
        m[(dim - 1) * dim + j] = 1.0;
    }
    let mut b = vec![0.0; dim];
    b[dim - 1] = 1.0;

    // Gaussian elimination with partial pivoting.
    for col in 0..dim {
        let mut pivot = col;
        let mut best = m[col * dim + col].abs();
        for row in col + 1..dim {
            let a = m[row * dim + col].abs();
            if a > best {
                best = a;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Err(Error::Numerical(
                "generator system is singular beyond the normalisation".into(),
            ));
        }
        if pivot != col {
            for j in 0..dim {
                m.swap(col * dim + j, pivot * dim + j);
            }
            b.swap(col, pivot);
        }
        let diag = m[col * dim + col];
        for row in col + 1..dim {
            let factor = m[row * dim + col] / diag;
            if factor != 0.0 {
                for j in col..dim {
                    m[row * dim + j] -= factor * m[col * dim + j];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut pi = vec![0.0; dim];
    for row in (0..dim).rev() {
        let mut acc = b[row];
        for j in row + 1..dim {
            acc -= m[row * dim + j] * pi[j];
        }
        pi[row] = acc / m[row * dim + row];
    }

    // residual check against the original generator
    let mut residual: f64 = 0.0;
    for j in 0..dim {
        let mut acc = 0.0;
        for i in 0..dim {
            acc += pi[i] * gen.data[i * dim + j];
        }
        residual = residual.max(acc.abs());
    }
    if residual > 1e-10 {
        return Err(Error::Numerical(format!(
            "stationary solve residual {residual:.3e} exceeds 1e-10"
        )));
    }
    if pi.iter().any(|&p| p < -1e-12) {
        return Err(Error::Numerical(
            "stationary solve produced a negative probability".into(),
        ));
    }
    let total: f64 = pi.iter().map(|&p| p.max(0.0)).sum();
    let probs: Vec<f64> = pi.iter().map(|&p| p.max(0.0) / total).collect();
    DistributionTable::new(gen.vertex_count, gen.capacity, probs)
}

/// Time-weighted occupation measure of a trajectory after `burn_in`.
pub fn empirical_stationary(traj: &Trajectory, burn_in: f64) -> Result<DistributionTable> {
    if !(burn_in >= 0.0 && burn_in < traj.horizon()) {
        return Err(Error::Argument(format!(
            "burn-in {burn_in} must lie in [0, horizon = {})",
            traj.horizon()
        )));
    }
    let dim = state_space_size(traj.vertex_count, traj.capacity, usize::MAX)?;
    let mut weights = vec![0.0; dim];
    let horizon = traj.horizon();
    let mut add = |state: &[u32], start: f64, end: f64| {
        let lo = start.max(burn_in);
        let hi = end.min(horizon);
        if hi > lo {
            weights[state_index(state, traj.capacity)] += hi - lo;
        }
    };
    let first_end = traj.times.first().copied().unwrap_or(horizon);
    add(&traj.initial_state, 0.0, first_end);
    for i in 0..traj.event_count() {
        let start = traj.times[i];
        let end = traj
            .times
            .get(i + 1)
            .copied()
            .unwrap_or(horizon)
            .max(start);
        add(traj.state(i), start, end);
    }
    let total: f64 = weights.iter().sum();
    let probs = weights.iter().map(|&w| w / total).collect();
    DistributionTable::new(traj.vertex_count, traj.capacity, probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrival(alpha: f64, beta: f64, capacity: u32) -> ModelParams {
        ModelParams::new(alpha, beta, capacity, Mode::ArrivalInteraction).unwrap()
    }

    #[test]
    fn state_indexing_round_trips() {
        let capacity = 3;
        for idx in 0..64 {
            let x = decode_state(idx, 3, capacity);
            assert_eq!(state_index(&x, capacity), idx);
        }
        // vertex 0 is least significant
        assert_eq!(state_index(&[1, 0, 0], capacity), 1);
        assert_eq!(state_index(&[0, 1, 0], capacity), 4);
    }

    #[test]
    fn zero_horizon_gives_an_empty_trajectory() {
        let g = Graph::empty(1).unwrap();
        let p = arrival(0.3, 0.0, 2);
        let traj = simulate(&p, &g, &[1], 0.0, 1000, 1).unwrap();
        assert_eq!(traj.event_count(), 0);
        assert_eq!(traj.final_state(), &[1]);
        assert_eq!(traj.final_time(), 0.0);
    }

    #[test]
    fn identical_seeds_give_identical_trajectories() {
        let g = Graph::path(3).unwrap();
        let p = arrival(-0.4, 0.3, 4);
        let a = simulate(&p, &g, &[0, 1, 2], 50.0, 1_000_000, 99).unwrap();
        let b = simulate(&p, &g, &[0, 1, 2], 50.0, 1_000_000, 99).unwrap();
        assert_eq!(a, b);
        let c = simulate(&p, &g, &[0, 1, 2], 50.0, 1_000_000, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trajectory_respects_bounds_and_jump_sizes() {
        let g = Graph::complete(2).unwrap();
        let p = arrival(0.2, 0.4, 3);
        let traj = simulate(&p, &g, &[0, 3], 200.0, 1_000_000, 7).unwrap();
        assert!(traj.event_count() > 100);
        let mut prev = traj.initial_state().to_vec();
        let mut prev_t = 0.0;
        for i in 0..traj.event_count() {
            let t = traj.times()[i];
            assert!(t > prev_t && t <= traj.horizon());
            let s = traj.state(i);
            assert!(s.iter().all(|&c| c <= p.capacity));
            let l1: i64 = s
                .iter()
                .zip(&prev)
                .map(|(&a, &b)| (i64::from(a) - i64::from(b)).abs())
                .sum();
            assert_eq!(l1, 1);
            prev.copy_from_slice(s);
            prev_t = t;
        }
    }

    #[test]
    fn event_counts_match_poisson_statistics() {
        // single vertex, N=1: the chain alternates 0 <-> 1 at unit rates, so
        // events arrive as a Poisson process; over [0,T] the count has mean
        // and variance T.
        let g = Graph::empty(1).unwrap();
        let p = arrival(-1.7, 0.0, 1); // alpha is irrelevant while x stays in {0,1}
        let t = 5.0;
        let replicas = 10_000u64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for r in 0..replicas {
            let traj = simulate(&p, &g, &[0], t, 100_000, 300 + r).unwrap();
            let k = traj.event_count() as f64;
            sum += k;
            sumsq += k * k;
        }
        let mean = sum / replicas as f64;
        let var = sumsq / replicas as f64 - mean * mean;
        // 4 sigma on the mean estimate: 4 * sqrt(5 / 1e4) ~ 0.09
        assert!((mean - t).abs() < 0.1, "mean {mean}");
        assert!((var - t).abs() < 0.5, "var {var}");
    }

    #[test]
    fn beta_zero_components_are_independent() {
        // joint occupation factorises into the product of the marginals
        let g = Graph::complete(2).unwrap();
        let p = arrival(-0.3, 0.0, 2);
        let traj = simulate(&p, &g, &[0, 0], 20_000.0, 100_000_000, 5).unwrap();
        let occ = empirical_stationary(&traj, 100.0).unwrap();
        let mut marg0 = [0.0; 3];
        let mut marg1 = [0.0; 3];
        for i in 0..occ.state_count() {
            let s = occ.state_at(i);
            marg0[s[0] as usize] += occ.probs()[i];
            marg1[s[1] as usize] += occ.probs()[i];
        }
        for i in 0..occ.state_count() {
            let s = occ.state_at(i);
            let joint = occ.probs()[i];
            let product = marg0[s[0] as usize] * marg1[s[1] as usize];
            assert!(
                (joint - product).abs() < 0.01,
                "state {s:?}: joint {joint} vs product {product}"
            );
        }
    }

    #[test]
    fn scaled_chain_at_n_one_is_the_plain_chain() {
        let g = Graph::complete(2).unwrap();
        let p = arrival(-0.5, 0.25, 5);
        let plain = simulate(&p, &g, &[1, 0], 30.0, 1_000_000, 11).unwrap();
        let scaled = simulate_scaled(&p, &g, 1, 5, &[1, 0], 30.0, 1_000_000, 11).unwrap();
        assert_eq!(plain, scaled);
    }

    #[test]
    fn scaled_state_respects_the_rescaled_capacity() {
        let n = 64u64;
        let capacity_n = 16u32;
        let g = Graph::empty(1).unwrap();
        let p = arrival(0.5, 0.0, 1);
        let traj = simulate_scaled(&p, &g, n, capacity_n, &[0], 2.0, 10_000_000, 3).unwrap();
        let bound = f64::from(capacity_n) / (n as f64).sqrt();
        let paths = rescale(&traj, n, 50).unwrap();
        for p in &paths {
            assert!(p.values().iter().all(|&x| (0.0..=bound).contains(&x)));
        }
    }

    #[test]
    fn scaled_event_guard_trips() {
        let g = Graph::empty(1).unwrap();
        let p = arrival(0.0, 0.0, 1000);
        // horizon 1e4 * rate 2 = 2e4 expected events > 1e3 cap
        let err = simulate_scaled(&p, &g, 10_000, 1000, &[0], 1.0, 1000, 1).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn rescale_constant_trajectory_is_constant() {
        let g = Graph::empty(1).unwrap();
        let p = arrival(0.0, 0.0, 4);
        let traj = simulate(&p, &g, &[2], 0.0, 10, 1).unwrap();
        // no events: path is constant at 2/sqrt(n)
        let paths = rescale(&traj, 4, 8);
        // zero horizon -> grid would be degenerate; expect an error
        assert!(paths.is_err() || paths.unwrap()[0].values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn rescale_final_sample_is_last_state_over_sqrt_n() {
        let g = Graph::empty(1).unwrap();
        let p = arrival(0.1, 0.0, 50);
        let n = 9u64;
        let traj = simulate_scaled(&p, &g, n, 50, &[0], 5.0, 1_000_000, 21).unwrap();
        let paths = rescale(&traj, n, 40).unwrap();
        let last = *paths[0].values().last().unwrap();
        assert_eq!(last, f64::from(traj.final_state()[0]) / 3.0);
    }

    #[test]
    fn generator_of_two_state_chain() {
        let g = Graph::empty(1).unwrap();
        let p = arrival(0.7, 0.0, 1);
        let gen = generator_matrix(&p, &g, 16).unwrap();
        assert_eq!(gen.dim(), 2);
        assert_eq!(gen.entry(0, 0), -1.0);
        assert_eq!(gen.entry(0, 1), 1.0);
        assert_eq!(gen.entry(1, 0), 1.0);
        assert_eq!(gen.entry(1, 1), -1.0);
    }

    #[test]
    fn generator_rows_sum_to_zero() {
        let g = Graph::path(2).unwrap();
        let p = arrival(-0.8, 0.5, 3);
        let gen = generator_matrix(&p, &g, 4096).unwrap();
        for i in 0..gen.dim() {
            let sum: f64 = (0..gen.dim()).map(|j| gen.entry(i, j)).sum();
            assert!(sum.abs() < 1e-12);
        }
    }

    #[test]
    fn generator_birth_entry_is_the_log_linear_rate() {
        let g = Graph::empty(1).unwrap();
        let alpha = -0.9;
        let p = arrival(alpha, 0.0, 2);
        let gen = generator_matrix(&p, &g, 16).unwrap();
        assert!((gen.entry(1, 2) - alpha.exp()).abs() < 1e-15);
    }

    #[test]
    fn generator_respects_the_state_space_cap() {
        let g = Graph::complete(3).unwrap();
        let p = arrival(0.0, 0.0, 20);
        assert!(matches!(
            generator_matrix(&p, &g, 4096),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn exact_stationary_of_symmetric_two_state_chain() {
        let g = Graph::empty(1).unwrap();
        let p = arrival(0.4, 0.0, 1);
        let table = exact_stationary(&generator_matrix(&p, &g, 16).unwrap()).unwrap();
        assert!((table.probs()[0] - 0.5).abs() < 1e-14);
        assert!((table.probs()[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn exact_stationary_matches_the_exponential_weight_single_vertex() {
        let g = Graph::empty(1).unwrap();
        let alpha = 0.6;
        let p = arrival(alpha, 0.0, 2);
        let table = exact_stationary(&generator_matrix(&p, &g, 16).unwrap()).unwrap();
        let z = 2.0 + alpha.exp();
        for (i, expected) in [1.0 / z, 1.0 / z, alpha.exp() / z].iter().enumerate() {
            assert!((table.probs()[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_stationary_matches_the_exponential_weight_k2() {
        let g = Graph::complete(2).unwrap();
        let beta = -1.1;
        let p = arrival(0.0, beta, 1);
        let table = exact_stationary(&generator_matrix(&p, &g, 16).unwrap()).unwrap();
        let z = 3.0 + beta.exp();
        let expected = [1.0 / z, 1.0 / z, 1.0 / z, beta.exp() / z];
        for i in 0..4 {
            assert!(
                (table.probs()[i] - expected[i]).abs() < 1e-12,
                "state {i}: {} vs {}",
                table.probs()[i],
                expected[i]
            );
        }
    }

    #[test]
    fn empirical_stationary_with_no_tail_events_concentrates() {
        let g = Graph::empty(1).unwrap();
        let p = arrival(0.0, 0.0, 1);
        let traj = simulate(&p, &g, &[0], 10.0, 1000, 17).unwrap();
        assert!(traj.final_time() < traj.horizon());
        let final_state = traj.final_state().to_vec();
        // burn-in after the last event: all the weight is on the tail state
        let burn_in = 0.5 * (traj.final_time() + traj.horizon());
        let occ = empirical_stationary(&traj, burn_in).unwrap();
        assert_eq!(occ.prob_of(&final_state), 1.0);
    }

    #[test]
    fn empirical_stationary_probabilities_sum_to_one() {
        let g = Graph::path(2).unwrap();
        let p = arrival(-0.2, 0.1, 2);
        let traj = simulate(&p, &g, &[0, 0], 500.0, 1_000_000, 23).unwrap();
        let occ = empirical_stationary(&traj, 50.0).unwrap();
        let sum: f64 = occ.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_converges_to_exact_for_the_two_state_chain() {
        let g = Graph::empty(1).unwrap();
        let p = arrival(2.2, 0.0, 1);
        let traj = simulate(&p, &g, &[0], 50_000.0, 10_000_000, 31).unwrap();
        let occ = empirical_stationary(&traj, 1000.0).unwrap();
        assert!((occ.probs()[0] - 0.5).abs() < 0.01);
    }

    #[test]
    fn empirical_stationary_rejects_bad_burn_in() {
        let g = Graph::empty(1).unwrap();
        let p = arrival(0.0, 0.0, 1);
        let traj = simulate(&p, &g, &[0], 1.0, 1000, 2).unwrap();
        assert!(empirical_stationary(&traj, 1.0).is_err());
        assert!(empirical_stationary(&traj, -0.5).is_err());
    }

    #[test]
    fn trajectory_csv_shape() {
        let g = Graph::path(2).unwrap();
        let p = arrival(0.0, 0.0, 1);
        let traj = simulate_for_events(&p, &g, &[0, 1], 3, 8).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,v0,v1");
        assert_eq!(lines.clone().count(), 4); // initial row + 3 events
        let first = lines.next().unwrap();
        assert!(first.starts_with("0."));
        assert!(first.ends_with(",0,1"));
    }

    #[test]
    fn distribution_table_csv_shape() {
        let table = DistributionTable::new(1, 1, vec![0.25, 0.75]).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "state_index,x0,prob");
        assert!(lines[1].starts_with("0,0,2.5"));
        assert!(lines[2].starts_with("1,1,7.5"));
    }
}
