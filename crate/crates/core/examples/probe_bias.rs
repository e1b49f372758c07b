//! Scratch probe: boundary bias of the reflected integrator at dt=1e-3.
use oureflect_core::graph::Graph;
use oureflect_core::sde::{sample_marginal, DiffusionSpec};

fn main() {
    let spec = DiffusionSpec::new(0.0, 0.0, Graph::empty(1).unwrap(), vec![0.0]).unwrap();
    let exact = 2.0 / std::f64::consts::PI.sqrt();
    let replicas = 1_000_000;
    let samples = sample_marginal(&spec, 1.0, 1e-3, replicas, 777).unwrap();
    let mean: f64 = samples.iter().map(|s| s[0]).sum::<f64>() / replicas as f64;
    let var: f64 = samples.iter().map(|s| (s[0] - mean).powi(2)).sum::<f64>() / replicas as f64;
    let se = (var / replicas as f64).sqrt();
    println!(
        "replicas={replicas} mean={mean:.6} se={se:.6} exact={exact:.6} rel_err={:.4}% +- {:.4}%",
        100.0 * (mean - exact).abs() / exact,
        100.0 * se / exact
    );
}
