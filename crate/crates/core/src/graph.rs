//! Finite undirected graphs: adjacency action, degrees, spectral radius and
//! the critical interaction strength.

use crate::error::{Error, Result};
use serde::Serialize;

/// Default absolute tolerance for the spectral radius. It feeds threshold
/// comparisons that must be sharp in tests, hence the tight default.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Iteration cap for the power method.
pub const EIG_MAX_ITERS: usize = 100_000;

/// A finite undirected simple graph on vertices `0..vertex_count`.
///
/// Immutable after construction and safe to share across concurrently
/// running simulation replicas.
#[derive(Debug, Clone, Serialize)]
pub struct Graph {
    vertex_count: usize,
    /// Normalised edge list: `u < v`, sorted, no duplicates.
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Build a graph from an edge list. Self-loops, out-of-range indices and
    /// duplicate edges are rejected.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Argument("graph needs at least one vertex".into()));
        }
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::Argument(format!("self-loop at vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::Argument(format!(
                    "edge ({u},{v}) out of range for {vertex_count} vertices"
                )));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Argument("duplicate edge".into()));
        }
        let mut neighbors = vec![Vec::new(); vertex_count];
        for &(u, v) in &normalized {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        Ok(Self {
            vertex_count,
            edges: normalized,
            neighbors,
        })
    }

    /// Complete graph on `m` vertices.
    pub fn complete(m: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..m {
            for v in u + 1..m {
                edges.push((u, v));
            }
        }
        Self::new(m, &edges)
    }

    /// Star with center `0` and `leaves` leaves.
    pub fn star(leaves: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::new(leaves + 1, &edges)
    }

    /// Path graph `0 - 1 - ... - (m-1)`.
    pub fn path(m: usize) -> Result<Self> {
        let edges: Vec<_> = (1..m).map(|v| (v - 1, v)).collect();
        Self::new(m, &edges)
    }

    /// Graph with `m` vertices and no edges.
    pub fn empty(m: usize) -> Result<Self> {
        Self::new(m, &[])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Per-vertex degree; sums to twice the edge count.
    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    /// Apply the adjacency matrix: `result[v] = sum over neighbours u of x[u]`.
    pub fn adjacency_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.vertex_count {
            return Err(Error::Argument(format!(
                "adjacency_apply: vector length {} does not match vertex count {}",
                x.len(),
                self.vertex_count
            )));
        }
        Ok((0..self.vertex_count)
            .map(|v| self.neighbors[v].iter().map(|&u| x[u]).sum())
            .collect())
    }

    /// Largest eigenvalue of the adjacency matrix, to absolute accuracy `tol`.
    ///
    /// Power iteration with the all-ones start vector, run on `A + I` so that
    /// the top eigenvalue strictly dominates in magnitude even on bipartite
    /// graphs, where the plain spectrum is symmetric and the iteration would
    /// oscillate. The shift is subtracted off at the end. Stops once the
    /// residual norm certifies the eigenvalue to `tol`.
    pub fn principal_eigenvalue(&self, tol: f64) -> Result<f64> {
        if tol <= 0.0 {
            return Err(Error::Argument("tolerance must be positive".into()));
        }
        let n = self.vertex_count;
        // The all-ones start stays unnormalised on the first round so that
        // regular graphs (where it already is the top eigenvector) come out
        // exact: the Rayleigh quotient is then a ratio of small integers.
        let mut v = vec![1.0; n];
        let mut w = vec![0.0; n];
        for iter in 0..EIG_MAX_ITERS {
            // w = (A + I) v
            for i in 0..n {
                w[i] = v[i] + self.neighbors[i].iter().map(|&u| v[u]).sum::<f64>();
            }
            let vv: f64 = v.iter().map(|a| a * a).sum();
            let theta: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / vv;
            let residual: f64 = v
                .iter()
                .zip(&w)
                .map(|(a, b)| (b - theta * a).powi(2))
                .sum::<f64>()
                .sqrt()
                / vv.sqrt();
            if residual <= tol {
                // For a symmetric matrix the Rayleigh residual bounds the
                // distance to the nearest eigenvalue.
                return Ok((theta - 1.0).max(0.0));
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Numerical(format!(
                    "power iteration collapsed to zero after {iter} iterations"
                )));
            }
            for i in 0..n {
                v[i] = w[i] / norm;
            }
        }
        Err(Error::Numerical(format!(
            "power iteration did not reach tol={tol} within {EIG_MAX_ITERS} iterations"
        )))
    }

    /// Critical interaction strength `-alpha / nu(G)`, defined for
    /// `alpha < 0` on graphs with at least one edge.
    pub fn critical_beta(&self, alpha: f64) -> Result<f64> {
        if alpha >= 0.0 {
            return Err(Error::Domain(
                "critical beta is defined for alpha < 0".into(),
            ));
        }
        if self.edges.is_empty() {
            return Err(Error::Domain(
                "critical beta undefined on an edgeless graph (spectral radius 0)".into(),
            ));
        }
        let nu = self.principal_eigenvalue(DEFAULT_EIG_TOL)?;
        Ok(-alpha / nu)
    }

    /// Parse the edge-list text format: the first non-comment line is the
    /// vertex count, every following line is `u v` with 0-based indices.
    /// Lines starting with `#` and blank lines are ignored.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut vertex_count: Option<usize> = None;
        let mut edges = Vec::new();
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_string(),
            line,
            msg,
        };
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match vertex_count {
                None => {
                    let n = line
                        .parse::<usize>()
                        .map_err(|_| err(line_no, format!("expected vertex count, got {line:?}")))?;
                    vertex_count = Some(n);
                }
                Some(_) => {
                    let mut it = line.split_whitespace();
                    let u = it
                        .next()
                        .ok_or_else(|| err(line_no, "missing edge endpoint".into()))?
                        .parse::<usize>()
                        .map_err(|_| err(line_no, format!("bad vertex index in {line:?}")))?;
                    let v = it
                        .next()
                        .ok_or_else(|| err(line_no, "edge line needs two endpoints".into()))?
                        .parse::<usize>()
                        .map_err(|_| err(line_no, format!("bad vertex index in {line:?}")))?;
                    if it.next().is_some() {
                        return Err(err(line_no, format!("trailing tokens in {line:?}")));
                    }
                    if u == v {
                        return Err(err(line_no, format!("self-loop at vertex {u}")));
                    }
                    if edges.contains(&(u.min(v), u.max(v))) {
                        return Err(err(line_no, format!("duplicate edge ({u},{v})")));
                    }
                    edges.push((u.min(v), u.max(v)));
                }
            }
        }
        let n = vertex_count
            .ok_or_else(|| err(0, "empty graph file: expected a vertex count".into()))?;
        Self::new(n, &edges)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }
}
