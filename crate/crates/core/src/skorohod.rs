//! One-dimensional reflection map on sampled paths.
//!
//! For a path `psi` with `psi(0) >= 0` the reflected path is
//! `psi(t) - min(0, inf over [0,t] of psi)`; the regulator is the
//! difference between the reflected path and `psi`. On a grid this is a
//! single left-to-right pass, and it is exact for step paths.

use crate::error::{Error, Result};
use std::io::Write;

/// How grid values are meant to be interpolated between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    /// Right-continuous step path (chain trajectories).
    Step,
    /// Piecewise-linear path (diffusion grids).
    Linear,
}

/// A real-valued path sampled on a strictly increasing grid starting at 0.
#[derive(Debug, Clone)]
pub struct SampledPath {
    grid: Vec<f64>,
    values: Vec<f64>,
    interp: Interp,
}

impl SampledPath {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, interp: Interp) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Argument("path needs at least one grid point".into()));
        }
        if grid.len() != values.len() {
            return Err(Error::Argument(format!(
                "grid length {} != value count {}",
                grid.len(),
                values.len()
            )));
        }
        if grid[0] != 0.0 {
            return Err(Error::Argument("grid must start at 0".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument("grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("path values must be finite".into()));
        }
        Ok(Self {
            grid,
            values,
            interp,
        })
    }

    pub fn step(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values, Interp::Step)
    }

    pub fn linear(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values, Interp::Linear)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one point
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    /// Write as `t,value` CSV.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (t, v) in self.grid.iter().zip(&self.values) {
            writeln!(w, "{},{}", crate::format_f64(*t), crate::format_f64(*v))?;
        }
        Ok(())
    }
}

/// Reflected path plus the nondecreasing regulator that produced it.
#[derive(Debug, Clone)]
pub struct ReflectionSolution {
    pub reflected: SampledPath,
    pub regulator: SampledPath,
}

impl ReflectionSolution {
    /// Write as `t,psi,gamma,phi` CSV, reconstructing `psi` as
    /// `reflected - regulator`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,psi,gamma,phi")?;
        for i in 0..self.reflected.len() {
            let t = self.reflected.grid()[i];
            let gamma = self.reflected.values()[i];
            let phi = self.regulator.values()[i];
            writeln!(
                w,
                "{},{},{},{}",
                crate::format_f64(t),
                crate::format_f64(gamma - phi),
                crate::format_f64(gamma),
                crate::format_f64(phi)
            )?;
        }
        Ok(())
    }
}

/// Apply the reflection map to `psi` (requires `psi(0) >= 0`).
///
/// Returns the reflected path and the regulator `reflected - psi` on the
/// same grid. One pass, O(len).
pub fn reflect(psi: &SampledPath) -> Result<ReflectionSolution> {
    if psi.values[0] < 0.0 {
        return Err(Error::Domain(format!(
            "reflection requires psi(0) >= 0, got {}",
            psi.values[0]
        )));
    }
    let n = psi.len();
    let mut reflected = Vec::with_capacity(n);
    let mut regulator = Vec::with_capacity(n);
    let mut running_min = f64::INFINITY;
    for i in 0..n {
        let value = psi.values[i];
        running_min = running_min.min(value);
        let gamma = value - 0f64.min(running_min);
        reflected.push(gamma);
        regulator.push(gamma - value);
    }
    Ok(ReflectionSolution {
        reflected: SampledPath::new(psi.grid.clone(), reflected, psi.interp)?,
        regulator: SampledPath::new(psi.grid.clone(), regulator, psi.interp)?,
    })
}

/// Total regulator increase accrued while the reflected path stays away from
/// the boundary (both interval endpoints above `eps`). Exact complementarity
/// means the regulator only grows at the boundary, so the defect is 0.
pub fn complementarity_defect(sol: &ReflectionSolution, eps: f64) -> f64 {
    let gamma = sol.reflected.values();
    let phi = sol.regulator.values();
    let mut defect = 0.0;
    for i in 1..gamma.len() {
        if gamma[i - 1].min(gamma[i]) > eps {
            defect += phi[i] - phi[i - 1];
        }
    }
    defect
}

/// True iff `psi1 - psi2` is nondecreasing on the (shared) grid; under this
/// strong ordering the reflected paths are ordered the same way, which the
/// property tests assert.
pub fn check_majorisation(psi1: &SampledPath, psi2: &SampledPath) -> Result<bool> {
    if psi1.grid != psi2.grid {
        return Err(Error::Argument(
            "majorisation check requires a common grid".into(),
        ));
    }
    if !(psi1.values[0] >= psi2.values[0] && psi2.values[0] >= 0.0) {
        return Err(Error::Argument(
            "majorisation check requires psi1(0) >= psi2(0) >= 0".into(),
        ));
    }
    let mut prev = f64::NEG_INFINITY;
    for (a, b) in psi1.values.iter().zip(&psi2.values) {
        let diff = a - b;
        if diff < prev {
            return Ok(false);
        }
        prev = diff;
    }
    Ok(true)
}
