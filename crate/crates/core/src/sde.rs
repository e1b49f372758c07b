//! Euler-Maruyama integration of the limit system: interacting
//! Ornstein-Uhlenbeck processes reflected at the origin.
//!
//! Each step proposes an unconstrained increment with drift
//! `alpha x_v + beta (Ax)_v` and noise `sqrt(2) sqrt(dt) xi`, and reflects by
//! the running-infimum map: the accumulated driver `y` is stored per
//! coordinate and the state is `y - min(0, running min of y)`. That is the
//! discrete Skorohod map applied stepwise (identical, jump by jump, to the
//! per-step projection `max(0, proposal)` in exact arithmetic), so feeding
//! the driver back through [`crate::skorohod::reflect`] reproduces the path
//! and its regulator bit for bit.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{replica_rng, Stream};
use crate::skorohod::SampledPath;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::io::Write;

/// Parameters of the reflected diffusion.
#[derive(Debug, Clone)]
pub struct DiffusionSpec {
    pub alpha: f64,
    pub beta: f64,
    pub graph: Graph,
    pub x0: Vec<f64>,
}

impl DiffusionSpec {
    pub fn new(alpha: f64, beta: f64, graph: Graph, x0: Vec<f64>) -> Result<Self> {
        if x0.len() != graph.vertex_count() {
            return Err(Error::Argument(format!(
                "x0 length {} does not match vertex count {}",
                x0.len(),
                graph.vertex_count()
            )));
        }
        if x0.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::Argument(
                "initial state must be nonnegative and finite".into(),
            ));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Argument("alpha and beta must be finite".into()));
        }
        Ok(Self {
            alpha,
            beta,
            graph,
            x0,
        })
    }
}

/// A grid path of the reflected system: states and per-coordinate
/// regulators on the uniform grid `0, dt, 2 dt, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionPath {
    vertex_count: usize,
    dt: f64,
    /// `steps + 1` rows, flat.
    states: Vec<f64>,
    regulators: Vec<f64>,
}

impl DiffusionPath {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of integration steps (grid has one more point).
    pub fn steps(&self) -> usize {
        self.states.len() / self.vertex_count - 1
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..=self.steps()).map(|k| k as f64 * self.dt).collect()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.vertex_count..(k + 1) * self.vertex_count]
    }

    pub fn regulator(&self, k: usize) -> &[f64] {
        &self.regulators[k * self.vertex_count..(k + 1) * self.vertex_count]
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.steps())
    }

    /// CSV dump: `t,x_v0,..,phi_v0,..`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t")?;
        for v in 0..self.vertex_count {
            write!(w, ",x_v{v}")?;
        }
        for v in 0..self.vertex_count {
            write!(w, ",phi_v{v}")?;
        }
        writeln!(w)?;
        for k in 0..=self.steps() {
            write!(w, "{}", crate::format_f64(k as f64 * self.dt))?;
            for &x in self.state(k) {
                write!(w, ",{}", crate::format_f64(x))?;
            }
            for &p in self.regulator(k) {
                write!(w, ",{}", crate::format_f64(p))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn step_count(dt: f64, horizon: f64) -> Result<usize> {
    if !(dt > 0.0) || !(horizon >= 0.0) {
        return Err(Error::Argument(
            "dt must be positive and the horizon nonnegative".into(),
        ));
    }
    if horizon == 0.0 {
        return Ok(0);
    }
    if dt > horizon {
        return Err(Error::Argument(format!(
            "dt = {dt} exceeds the horizon {horizon}"
        )));
    }
    // snap to the grid when horizon is an exact multiple of dt
    Ok((horizon / dt - 1e-9).ceil() as usize)
}

/// One coordinate-major Euler step of every coordinate, reflected through
/// the running-infimum map.
struct Stepper<'a> {
    spec: &'a DiffusionSpec,
    dt: f64,
    noise_scale: f64,
    driver: Vec<f64>,
    running_min: Vec<f64>,
    state: Vec<f64>,
    regulator: Vec<f64>,
    neighbor_sum: Vec<f64>,
    rng: Stream,
    step_index: usize,
}

impl<'a> Stepper<'a> {
    fn new(spec: &'a DiffusionSpec, dt: f64, rng: Stream) -> Self {
        let n = spec.x0.len();
        let driver = spec.x0.clone();
        // mirror reflect(): the running minimum includes the initial value
        let running_min = driver.clone();
        let mut state = vec![0.0; n];
        let mut regulator = vec![0.0; n];
        for v in 0..n {
            state[v] = driver[v] - 0f64.min(running_min[v]);
            regulator[v] = state[v] - driver[v];
        }
        Self {
            spec,
            dt,
            noise_scale: 2f64.sqrt() * dt.sqrt(),
            driver,
            running_min,
            state,
            regulator,
            neighbor_sum: vec![0.0; n],
            rng,
            step_index: 0,
        }
    }

    fn step(&mut self) -> Result<()> {
        let n = self.state.len();
        // neighbour sums of the pre-step state: all coordinates advance
        // simultaneously
        for v in 0..n {
            self.neighbor_sum[v] = self
                .spec
                .graph
                .neighbors(v)
                .iter()
                .map(|&u| self.state[u])
                .sum();
        }
        for v in 0..n {
            let xi: f64 = self.rng.sample(StandardNormal);
            let drift = self.spec.alpha * self.state[v] + self.spec.beta * self.neighbor_sum[v];
            let increment = drift * self.dt + self.noise_scale * xi;
            self.driver[v] += increment;
            self.running_min[v] = self.running_min[v].min(self.driver[v]);
            self.state[v] = self.driver[v] - 0f64.min(self.running_min[v]);
            self.regulator[v] = self.state[v] - self.driver[v];
            if !self.state[v].is_finite() {
                return Err(Error::Numerical(format!(
                    "state blew up at step {} (coordinate {v})",
                    self.step_index + 1
                )));
            }
        }
        self.step_index += 1;
        Ok(())
    }
}

/// Integrate the reflected system on the grid `0, dt, .., steps*dt` with
/// `steps = ceil(horizon/dt)`. Deterministic given the seed.
pub fn integrate(
    spec: &DiffusionSpec,
    dt: f64,
    horizon: f64,
    seed: u64,
) -> Result<DiffusionPath> {
    integrate_on_stream(spec, dt, horizon, replica_rng(seed, 0)).map(|(path, _)| path)
}

/// Integrate one member of a replica ensemble on its own derived stream.
pub fn integrate_on_replica(
    spec: &DiffusionSpec,
    dt: f64,
    horizon: f64,
    seed: u64,
    replica: u64,
) -> Result<DiffusionPath> {
    integrate_on_stream(spec, dt, horizon, replica_rng(seed, replica)).map(|(path, _)| path)
}

/// Like [`integrate`], but also return the per-coordinate driver paths the
/// integrator accumulated. Feeding a driver through
/// [`crate::skorohod::reflect`] reproduces the stored states and regulators
/// bit for bit; this is the strongest available self-test of the scheme.
pub fn integrate_with_driver(
    spec: &DiffusionSpec,
    dt: f64,
    horizon: f64,
    seed: u64,
) -> Result<(DiffusionPath, Vec<SampledPath>)> {
    let (path, drivers) = integrate_on_stream(spec, dt, horizon, replica_rng(seed, 0))?;
    let grid = path.grid();
    let driver_paths = drivers
        .into_iter()
        .map(|values| SampledPath::linear(grid.clone(), values))
        .collect::<Result<Vec<_>>>()?;
    Ok((path, driver_paths))
}

fn integrate_on_stream(
    spec: &DiffusionSpec,
    dt: f64,
    horizon: f64,
    rng: Stream,
) -> Result<(DiffusionPath, Vec<Vec<f64>>)> {
    let steps = step_count(dt, horizon)?;
    let n = spec.x0.len();
    let mut stepper = Stepper::new(spec, dt, rng);
    let mut states = Vec::with_capacity((steps + 1) * n);
    let mut regulators = Vec::with_capacity((steps + 1) * n);
    let mut drivers = vec![Vec::with_capacity(steps + 1); n];
    let mut record = |s: &Stepper| {
        states.extend_from_slice(&s.state);
        regulators.extend_from_slice(&s.regulator);
        for (v, d) in drivers.iter_mut().enumerate() {
            d.push(s.driver[v]);
        }
    };
    record(&stepper);
    for _ in 0..steps {
        stepper.step()?;
        record(&stepper);
    }
    drop(record);
    Ok((
        DiffusionPath {
            vertex_count: n,
            dt,
            states,
            regulators,
        },
        drivers,
    ))
}

/// Endpoint of one integration, without storing the path.
fn endpoint_on_stream(
    spec: &DiffusionSpec,
    dt: f64,
    horizon: f64,
    rng: Stream,
) -> Result<Vec<f64>> {
    let steps = step_count(dt, horizon)?;
    let mut stepper = Stepper::new(spec, dt, rng);
    for _ in 0..steps {
        stepper.step()?;
    }
    Ok(stepper.state)
}

/// Monte-Carlo marginal: `replicas` independent copies of the state at time
/// `t`, one per derived replica stream. Deterministic given the seed and
/// independent of the number of worker threads.
pub fn sample_marginal(
    spec: &DiffusionSpec,
    t: f64,
    dt: f64,
    replicas: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if replicas == 0 {
        return Err(Error::Argument("need at least one replica".into()));
    }
    (0..replicas as u64)
        .into_par_iter()
        .map(|r| endpoint_on_stream(spec, dt, t, replica_rng(seed, r)))
        .collect()
}

/// Recover the driving (unreflected) path of each coordinate as
/// `state - regulator` on the grid.
pub fn recover_driver(path: &DiffusionPath) -> Result<Vec<SampledPath>> {
    let grid = path.grid();
    (0..path.vertex_count())
        .map(|v| {
            let values = (0..=path.steps())
                .map(|k| path.state(k)[v] - path.regulator(k)[v])
                .collect();
            SampledPath::linear(grid.clone(), values)
        })
        .collect()
}
