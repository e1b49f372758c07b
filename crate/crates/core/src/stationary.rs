//! Closed-form stationary objects.
//!
//! The finite chain is reversible: its stationary law has an explicit
//! exponential form, and both rate modes satisfy detailed balance against
//! the same log-weight. Under the diffusion scaling the log-weight converges
//! to a quadratic form; when that quadratic is integrable over the positive
//! orthant it is the unnormalised log-density of the limit law, a centered
//! Gaussian restricted to the orthant.

use crate::ctmc::{state_space_size, DistributionTable};
use crate::error::{Error, Result};
use crate::graph::{Graph, DEFAULT_EIG_TOL};
use crate::model::{self, ModelParams};
use crate::rng::{replica_rng, Stream};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Log of the unnormalised stationary weight of the finite chain:
/// `(alpha/2) sum x_v (x_v - 1) + beta sum over edges x_u x_v`.
/// Both sums are exact integers, so the result carries a single rounding.
pub fn log_weight(p: &ModelParams, g: &Graph, x: &[u32]) -> f64 {
    let own: u64 = x
        .iter()
        .map(|&c| u64::from(c) * u64::from(c.saturating_sub(1)))
        .sum();
    let cross: u64 = g
        .edges()
        .iter()
        .map(|&(u, v)| u64::from(x[u]) * u64::from(x[v]))
        .sum();
    0.5 * p.alpha * own as f64 + p.beta * cross as f64
}

/// The stationary distribution of the finite chain, normalised with
/// log-sum-exp (the weights span hundreds of e-folds for moderate N).
pub fn finite_stationary(
    p: &ModelParams,
    g: &Graph,
    state_space_cap: usize,
) -> Result<DistributionTable> {
    let dim = state_space_size(g.vertex_count(), p.capacity, state_space_cap)?;
    let mut logs = Vec::with_capacity(dim);
    let mut max = f64::NEG_INFINITY;
    for i in 0..dim {
        let x = crate::ctmc::decode_state(i, g.vertex_count(), p.capacity);
        let w = log_weight(p, g, &x);
        max = max.max(w);
        logs.push(w);
    }
    let z: f64 = logs.iter().map(|&w| (w - max).exp()).sum();
    let probs = logs.iter().map(|&w| (w - max).exp() / z).collect();
    DistributionTable::new(g.vertex_count(), p.capacity, probs)
}

/// Worst-case detailed-balance defect over all ordered transition pairs,
/// evaluated in log-space:
/// `max |log r(x,y) + W(x) - W(y) - log r(y,x)|` over pairs with positive
/// rate. Exact reversibility makes this zero up to float rounding.
pub fn detailed_balance_residual(
    p: &ModelParams,
    g: &Graph,
    state_space_cap: usize,
) -> Result<f64> {
    let dim = state_space_size(g.vertex_count(), p.capacity, state_space_cap)?;
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        let x = crate::ctmc::decode_state(i, g.vertex_count(), p.capacity);
        let w_x = log_weight(p, g, &x);
        for v in 0..g.vertex_count() {
            if x[v] < p.capacity {
                let mut y = x.clone();
                y[v] += 1;
                let w_y = log_weight(p, g, &y);
                let forward = model::birth_log_rate(p, g, &x, v);
                let backward = model::death_log_rate(p, g, &y, v);
                worst = worst.max((forward + w_x - w_y - backward).abs());
            }
        }
    }
    Ok(worst)
}

/// The limit log-density `(alpha/2) sum x_v^2 + beta sum over edges x_u x_v`,
/// i.e. the quadratic form `((alpha I + beta A) x, x) / 2`.
pub fn limit_log_density(alpha: f64, beta: f64, g: &Graph, x: &[f64]) -> Result<f64> {
    if x.len() != g.vertex_count() {
        return Err(Error::Argument(format!(
            "vector length {} does not match vertex count {}",
            x.len(),
            g.vertex_count()
        )));
    }
    let own: f64 = x.iter().map(|&c| c * c).sum();
    let cross: f64 = g.edges().iter().map(|&(u, v)| x[u] * x[v]).sum();
    Ok(0.5 * alpha * own + beta * cross)
}

/// Log stationary weight of the `n`-th rescaled chain at a rescaled state:
/// the limit quadratic plus the vanishing `-alpha/(2 sqrt n) sum x_v`
/// correction.
pub fn scaled_log_weight(alpha: f64, beta: f64, g: &Graph, n: u64, xn: &[f64]) -> Result<f64> {
    let quad = limit_log_density(alpha, beta, g, xn)?;
    let linear: f64 = xn.iter().sum();
    Ok(quad - alpha / (2.0 * (n as f64).sqrt()) * linear)
}

/// Project a real state onto the lattice of the `n`-th rescaled chain:
/// `floor(sqrt(n) x) / sqrt(n)` componentwise.
pub fn embed_state(x: &[f64], n: u64) -> Vec<f64> {
    let s = (n as f64).sqrt();
    x.iter().map(|&c| (s * c).floor() / s).collect()
}

/// Integrability of `exp` of the limit quadratic over the positive orthant:
/// `alpha < 0` and `alpha + beta nu(G) < 0`, the latter compared strictly
/// against the eigenvalue tolerance so that the boundary case counts as
/// non-integrable.
pub fn is_integrable(alpha: f64, beta: f64, g: &Graph) -> Result<bool> {
    if alpha >= 0.0 {
        return Ok(false);
    }
    let nu = g.principal_eigenvalue(DEFAULT_EIG_TOL)?;
    Ok(alpha + beta * nu < -DEFAULT_EIG_TOL)
}

/// The limit law with its integrability flag cached at construction.
#[derive(Debug, Clone, Serialize)]
pub struct LimitMeasureSpec {
    pub alpha: f64,
    pub beta: f64,
    pub graph: Graph,
    pub integrable: bool,
}

impl LimitMeasureSpec {
    pub fn new(alpha: f64, beta: f64, graph: Graph) -> Result<Self> {
        let integrable = is_integrable(alpha, beta, &graph)?;
        Ok(Self {
            alpha,
            beta,
            graph,
            integrable,
        })
    }
}

/// Row-major `-alpha I - beta A`; positive definite exactly when the limit
/// law is integrable, in which case it is the inverse covariance.
fn interaction_matrix(alpha: f64, beta: f64, g: &Graph) -> Vec<f64> {
    let n = g.vertex_count();
    let mut m = vec![0.0; n * n];
    for v in 0..n {
        m[v * n + v] = -alpha;
        for &u in g.neighbors(v) {
            m[v * n + u] = -beta;
        }
    }
    m
}

/// Dense Cholesky factorisation, `m = L L^T`, lower factor row-major.
/// Failure to factorise means the matrix is not positive definite, which is
/// reported as a domain error consistent with the integrability criterion.
fn cholesky(dim: usize, m: &[f64]) -> Result<Vec<f64>> {
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut acc = m[i * dim + j];
            for k in 0..j {
                acc -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if acc <= 0.0 {
                    return Err(Error::Domain(
                        "interaction matrix is not positive definite".into(),
                    ));
                }
                l[i * dim + i] = acc.sqrt();
            } else {
                l[i * dim + j] = acc / l[j * dim + j];
            }
        }
    }
    Ok(l)
}

/// Draw from the centered Gaussian with covariance `(L L^T)^{-1}` by
/// back-substituting `L^T x = z` for a standard normal `z`.
fn gaussian_draw(dim: usize, l: &[f64], rng: &mut Stream) -> Vec<f64> {
    let z: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let mut x = vec![0.0; dim];
    for i in (0..dim).rev() {
        let mut acc = z[i];
        for j in i + 1..dim {
            // (L^T)[i][j] = L[j][i]
            acc -= l[j * dim + i] * x[j];
        }
        x[i] = acc / l[i * dim + i];
    }
    x
}

/// A Monte-Carlo estimate with its standard error, serialised as
/// `{estimate, std_error, acceptance_rate}`.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizingEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub acceptance_rate: f64,
}

/// Normalising constant of the limit density over the positive orthant:
/// the full-space Gaussian normaliser times the orthant probability. The
/// orthant probability is estimated by the acceptance rate of Gaussian
/// draws; the one-vertex case is returned in closed form.
pub fn normalizing_constant(
    alpha: f64,
    beta: f64,
    g: &Graph,
    replicas: usize,
    seed: u64,
) -> Result<NormalizingEstimate> {
    if !is_integrable(alpha, beta, g)? {
        return Err(Error::Domain(
            "limit density is not integrable for these parameters".into(),
        ));
    }
    let dim = g.vertex_count();
    if dim == 1 {
        // integral of exp(alpha x^2 / 2) over [0, inf)
        return Ok(NormalizingEstimate {
            estimate: (std::f64::consts::PI / (2.0 * alpha.abs())).sqrt(),
            std_error: 0.0,
            acceptance_rate: 0.5,
        });
    }
    if replicas == 0 {
        return Err(Error::Argument("need at least one replica".into()));
    }
    let l = cholesky(dim, &interaction_matrix(alpha, beta, g))?;
    let log_det_sqrt: f64 = (0..dim).map(|i| l[i * dim + i].ln()).sum();
    let full = ((2.0 * std::f64::consts::PI).ln() * dim as f64 / 2.0 - log_det_sqrt).exp();
    let mut rng = replica_rng(seed, 0);
    let mut accepted = 0usize;
    for _ in 0..replicas {
        let x = gaussian_draw(dim, &l, &mut rng);
        if x.iter().all(|&c| c >= 0.0) {
            accepted += 1;
        }
    }
    let p = accepted as f64 / replicas as f64;
    Ok(NormalizingEstimate {
        estimate: full * p,
        std_error: full * (p * (1.0 - p) / replicas as f64).sqrt(),
        acceptance_rate: p,
    })
}

/// Size of the probe batch used to detect pathologically small acceptance
/// rates before committing to a long rejection run.
const REJECTION_PROBE: u64 = 1_000_000;

/// Draw `count` samples of the limit law by rejection: propose from the
/// centered Gaussian with covariance `(-alpha I - beta A)^{-1}`, accept
/// inside the positive orthant. Errors out if the probe batch accepts
/// nothing (acceptance below about 1e-6).
pub fn sample_limit_measure(
    alpha: f64,
    beta: f64,
    g: &Graph,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    sample_limit_measure_with_rate(alpha, beta, g, count, seed).map(|(samples, _)| samples)
}

/// Same as [`sample_limit_measure`], additionally reporting the empirical
/// acceptance rate.
pub fn sample_limit_measure_with_rate(
    alpha: f64,
    beta: f64,
    g: &Graph,
    count: usize,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, f64)> {
    if !is_integrable(alpha, beta, g)? {
        return Err(Error::Domain(
            "limit density is not integrable for these parameters".into(),
        ));
    }
    if count == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let dim = g.vertex_count();
    let l = cholesky(dim, &interaction_matrix(alpha, beta, g))?;
    let mut rng = replica_rng(seed, 0);
    let mut samples = Vec::with_capacity(count);
    let mut attempts = 0u64;
    while samples.len() < count {
        attempts += 1;
        let x = gaussian_draw(dim, &l, &mut rng);
        if x.iter().all(|&c| c >= 0.0) {
            samples.push(x);
        } else if samples.is_empty() && attempts >= REJECTION_PROBE {
            return Err(Error::Resource(format!(
                "no acceptance in the first {REJECTION_PROBE} proposals; \
                 parameters sit too close to the integrability boundary"
            )));
        }
    }
    Ok((samples, count as f64 / attempts as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmc::{exact_stationary, generator_matrix};
    use crate::harness::tv_distance;
    use crate::model::Mode;
    use crate::rng::derive_seed;

    fn arrival(alpha: f64, beta: f64, capacity: u32) -> ModelParams {
        ModelParams::new(alpha, beta, capacity, Mode::ArrivalInteraction).unwrap()
    }

    #[test]
    fn log_weight_examples() {
        let single = Graph::empty(1).unwrap();
        let p = arrival(-0.8, 0.0, 4);
        assert_eq!(log_weight(&p, &single, &[0]), 0.0);
        assert_eq!(log_weight(&p, &single, &[2]), -0.8);

        let k2 = Graph::complete(2).unwrap();
        let p = arrival(-0.8, 0.45, 4);
        assert_eq!(log_weight(&p, &k2, &[1, 1]), 0.45);
    }

    #[test]
    fn finite_stationary_single_vertex() {
        let g = Graph::empty(1).unwrap();
        let p1 = arrival(1.3, 0.0, 1);
        let t1 = finite_stationary(&p1, &g, 4096).unwrap();
        assert!((t1.probs()[0] - 0.5).abs() < 1e-15);

        let alpha = -0.9;
        let p2 = arrival(alpha, 0.0, 2);
        let t2 = finite_stationary(&p2, &g, 4096).unwrap();
        let z = 2.0 + alpha.exp();
        assert!((t2.probs()[0] - 1.0 / z).abs() < 1e-15);
        assert!((t2.probs()[2] - alpha.exp() / z).abs() < 1e-15);
    }

    #[test]
    fn finite_stationary_matches_the_generator_oracle() {
        let g = Graph::complete(2).unwrap();
        let p = arrival(0.0, 0.7, 1);
        let closed = finite_stationary(&p, &g, 4096).unwrap();
        let solved = exact_stationary(&generator_matrix(&p, &g, 4096).unwrap()).unwrap();
        assert!(tv_distance(&closed, &solved).unwrap() <= 1e-10);
        let z = 3.0 + 0.7f64.exp();
        assert!((closed.probs()[3] - 0.7f64.exp() / z).abs() < 1e-14);
    }

    #[test]
    fn finite_stationary_survives_huge_weights() {
        // exponents around alpha/2 * N(N-1) ~ 500: naive exp would overflow
        let g = Graph::empty(1).unwrap();
        let p = arrival(35.0, 0.0, 6);
        let t = finite_stationary(&p, &g, 4096).unwrap();
        let sum: f64 = t.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(t.probs()[6] > 0.999);
    }

    #[test]
    fn detailed_balance_holds_for_random_instances_in_both_modes() {
        let graphs = [
            Graph::empty(1).unwrap(),
            Graph::complete(2).unwrap(),
            Graph::path(3).unwrap(),
            Graph::complete(3).unwrap(),
        ];
        let mut seed = 0x5eed;
        let mut next = move || {
            seed = derive_seed(seed, "db");
            (seed % 6001) as f64 / 1000.0 - 3.0
        };
        for mode in [Mode::ArrivalInteraction, Mode::DeathInteraction] {
            for g in &graphs {
                for capacity in [1u32, 4] {
                    let p = ModelParams::new(next(), next(), capacity, mode).unwrap();
                    let r = detailed_balance_residual(&p, g, 4096).unwrap();
                    assert!(r <= 1e-12, "mode {mode:?}, residual {r}");
                }
            }
        }
    }

    #[test]
    fn perturbed_rate_breaks_detailed_balance_by_its_log_factor() {
        // multiply one birth rate by 2 and redo the residual scan by hand
        let g = Graph::complete(2).unwrap();
        let p = arrival(-0.4, 0.3, 2);
        let dim = state_space_size(2, 2, 4096).unwrap();
        let bad_state = vec![1u32, 1];
        let bad_vertex = 0usize;
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            let x = crate::ctmc::decode_state(i, 2, 2);
            for v in 0..2 {
                if x[v] < 2 {
                    let mut y = x.clone();
                    y[v] += 1;
                    let mut forward = model::birth_log_rate(&p, &g, &x, v);
                    if x == bad_state && v == bad_vertex {
                        forward += 2f64.ln();
                    }
                    let backward = model::death_log_rate(&p, &g, &y, v);
                    let defect = (forward + log_weight(&p, &g, &x) - log_weight(&p, &g, &y)
                        - backward)
                        .abs();
                    worst = worst.max(defect);
                }
            }
        }
        assert!(worst >= 2f64.ln() - 1e-12, "worst {worst}");
    }

    #[test]
    fn limit_log_density_examples() {
        let single = Graph::empty(1).unwrap();
        assert_eq!(limit_log_density(-2.0, 0.0, &single, &[0.0]).unwrap(), 0.0);
        assert_eq!(limit_log_density(-2.0, 0.0, &single, &[1.0]).unwrap(), -1.0);
        let k2 = Graph::complete(2).unwrap();
        assert_eq!(
            limit_log_density(0.0, 1.0, &k2, &[1.0, 1.0]).unwrap(),
            1.0
        );
        assert!(limit_log_density(0.0, 1.0, &k2, &[1.0]).is_err());
    }

    #[test]
    fn scaled_log_weight_matches_the_chain_weight_on_the_lattice() {
        // with x^n = q / sqrt(n), the rescaled weight equals the chain weight
        // of q at parameters alpha/n, beta/n
        let g = Graph::path(3).unwrap();
        let (alpha, beta) = (-1.1, 0.4);
        let n = 25u64;
        let q = vec![7u32, 0, 13];
        let xn: Vec<f64> = q.iter().map(|&c| f64::from(c) / 5.0).collect();
        let scaled = scaled_log_weight(alpha, beta, &g, n, &xn).unwrap();
        let p = arrival(alpha / n as f64, beta / n as f64, 20);
        let chain = log_weight(&p, &g, &q);
        assert!((scaled - chain).abs() < 1e-12, "{scaled} vs {chain}");
    }

    #[test]
    fn scaled_log_weight_converges_to_the_limit_quadratic() {
        let g = Graph::complete(2).unwrap();
        let (alpha, beta) = (-1.0, 0.5);
        let x = [1.0, 1.0];
        let u = limit_log_density(alpha, beta, &g, &x).unwrap();
        let mut last = f64::INFINITY;
        for n in [100u64, 10_000, 1_000_000] {
            let xn = embed_state(&x, n);
            let wn = scaled_log_weight(alpha, beta, &g, n, &xn).unwrap();
            let err = (wn - u).abs();
            assert!(err < last, "error sequence must decrease: {err} vs {last}");
            last = err;
        }
        assert!(last < 1e-2, "final error {last}");
    }

    #[test]
    fn integrability_criterion() {
        let k2 = Graph::complete(2).unwrap();
        assert!(is_integrable(-1.0, 0.5, &k2).unwrap());
        assert!(!is_integrable(-1.0, 1.0, &k2).unwrap()); // boundary
        assert!(!is_integrable(1.0, -5.0, &k2).unwrap());
        assert!(!is_integrable(0.0, -1.0, &k2).unwrap());
        // just off the boundary on either side
        assert!(is_integrable(-1.0, 1.0 - 1e-9, &k2).unwrap());
        assert!(!is_integrable(-1.0, 1.0 + 1e-9, &k2).unwrap());
    }

    #[test]
    fn limit_measure_spec_caches_the_criterion() {
        let k2 = Graph::complete(2).unwrap();
        assert!(LimitMeasureSpec::new(-1.0, 0.25, k2.clone()).unwrap().integrable);
        assert!(!LimitMeasureSpec::new(-1.0, 2.0, k2).unwrap().integrable);
    }

    #[test]
    fn normalizing_constant_single_vertex_closed_forms() {
        let g = Graph::empty(1).unwrap();
        let z2 = normalizing_constant(-2.0, 0.0, &g, 1, 1).unwrap();
        assert!((z2.estimate - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(z2.std_error, 0.0);
        let z1 = normalizing_constant(-1.0, 0.0, &g, 1, 1).unwrap();
        assert!((z1.estimate - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn normalizing_constant_factorises_for_decoupled_pairs() {
        let g = Graph::complete(2).unwrap();
        let z = normalizing_constant(-1.0, 0.0, &g, 100_000, 7).unwrap();
        let expected = std::f64::consts::PI / 2.0;
        assert!(
            (z.estimate - expected).abs() < 3.0 * z.std_error,
            "{} vs {expected} (se {})",
            z.estimate,
            z.std_error
        );
        assert!((z.acceptance_rate - 0.25).abs() < 0.01);
    }

    #[test]
    fn normalizing_constant_rejects_non_integrable_parameters() {
        let g = Graph::complete(2).unwrap();
        assert!(matches!(
            normalizing_constant(-1.0, 1.0, &g, 100, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn limit_samples_match_the_half_normal_in_one_dimension() {
        let g = Graph::empty(1).unwrap();
        let (samples, rate) =
            sample_limit_measure_with_rate(-1.0, 0.0, &g, 100_000, 11).unwrap();
        let mut xs: Vec<f64> = samples.into_iter().map(|s| s[0]).collect();
        xs.sort_by(f64::total_cmp);
        // one-sample KS against the half-normal CDF erf(x / sqrt 2)
        let n = xs.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = statrs::function::erf::erf(x / 2f64.sqrt());
            ks = ks.max((f - i as f64 / n).abs());
            ks = ks.max(((i + 1) as f64 / n - f).abs());
        }
        assert!(ks < 0.01, "KS {ks}");
        // acceptance is the orthant probability of a centered 1-d Gaussian
        assert!((rate - 0.5).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn limit_sample_moments_match_the_truncated_gaussian() {
        let g = Graph::empty(1).unwrap();
        let alpha = -2.5;
        let count = 100_000;
        let samples = sample_limit_measure(alpha, 0.0, &g, count, 13).unwrap();
        let sigma = 1.0 / (-alpha).sqrt();
        let mean_expected = sigma * (2.0 / std::f64::consts::PI).sqrt();
        let var_expected = sigma * sigma * (1.0 - 2.0 / std::f64::consts::PI);
        let mean: f64 = samples.iter().map(|s| s[0]).sum::<f64>() / count as f64;
        let var: f64 =
            samples.iter().map(|s| (s[0] - mean).powi(2)).sum::<f64>() / count as f64;
        let se_mean = (var_expected / count as f64).sqrt();
        assert!((mean - mean_expected).abs() < 3.0 * se_mean, "mean {mean}");
        // standard error of the variance estimate, padded for the skew
        let se_var = var_expected * (2.0 / count as f64).sqrt() * 1.5;
        assert!((var - var_expected).abs() < 3.0 * se_var, "var {var}");
    }

    #[test]
    fn decoupled_coordinates_are_independent() {
        let g = Graph::complete(2).unwrap();
        let samples = sample_limit_measure(-1.0, 0.0, &g, 50_000, 17).unwrap();
        let n = samples.len() as f64;
        let m0: f64 = samples.iter().map(|s| s[0]).sum::<f64>() / n;
        let m1: f64 = samples.iter().map(|s| s[1]).sum::<f64>() / n;
        let mut cov = 0.0;
        let mut v0 = 0.0;
        let mut v1 = 0.0;
        for s in &samples {
            cov += (s[0] - m0) * (s[1] - m1);
            v0 += (s[0] - m0).powi(2);
            v1 += (s[1] - m1).powi(2);
        }
        let corr = cov / (v0.sqrt() * v1.sqrt());
        assert!(corr.abs() < 0.02, "correlation {corr}");
    }

    #[test]
    fn positively_coupled_samples_stay_in_the_orthant_and_correlate() {
        let g = Graph::complete(2).unwrap();
        let samples = sample_limit_measure(-1.0, 0.5, &g, 20_000, 19).unwrap();
        assert!(samples.iter().all(|s| s.iter().all(|&c| c >= 0.0)));
        let n = samples.len() as f64;
        let m0: f64 = samples.iter().map(|s| s[0]).sum::<f64>() / n;
        let m1: f64 = samples.iter().map(|s| s[1]).sum::<f64>() / n;
        let mut cov = 0.0;
        for s in &samples {
            cov += (s[0] - m0) * (s[1] - m1);
        }
        assert!(cov / n > 0.05, "cooperative coupling must correlate");
    }

    #[test]
    fn pathological_acceptance_is_a_resource_error() {
        // almost perfectly anti-correlated pair: the orthant has vanishing
        // probability, the probe batch must give up
        let g = Graph::complete(2).unwrap();
        let beta = -(1.0 - 1e-15);
        assert!(is_integrable(-1.0, beta, &g).unwrap());
        let err = sample_limit_measure(-1.0, beta, &g, 10, 23).unwrap_err();
        assert!(matches!(err, Error::Resource(_)), "{err:?}");
    }

    #[test]
    fn non_integrable_parameters_are_a_domain_error_for_the_sampler() {
        let g = Graph::complete(2).unwrap();
        assert!(matches!(
            sample_limit_measure(-1.0, 3.0, &g, 10, 1),
            Err(Error::Domain(_))
        ));
        // alpha > 0 is caught before any factorisation
        assert!(matches!(
            sample_limit_measure(0.5, 0.0, &g, 10, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cholesky_rejects_indefinite_matrices() {
        // beta beyond critical: -alpha I - beta A is indefinite
        let g = Graph::complete(2).unwrap();
        let m = interaction_matrix(-1.0, 2.0, &g);
        assert!(matches!(cholesky(2, &m), Err(Error::Domain(_))));
    }
}
