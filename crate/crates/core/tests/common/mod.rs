#![allow(dead_code)]

use sjperc_core::{ArithmeticMode, DistributionSpec, EnvironmentConfig, WeightEnvironment};

pub fn law(s: &str) -> DistributionSpec {
    s.parse().unwrap()
}

pub fn config(p: f64, xi: &str, eta: &str, mode: ArithmeticMode) -> EnvironmentConfig {
    EnvironmentConfig::new(p, law(xi), law(eta), mode).unwrap()
}

pub fn int_env(p: f64, xi: &str, eta: &str, seed: u64, extent: (usize, usize)) -> WeightEnvironment {
    WeightEnvironment::new(config(p, xi, eta, ArithmeticMode::Integer), seed, extent).unwrap()
}

pub fn real_env(p: f64, xi: &str, eta: &str, seed: u64, extent: (usize, usize)) -> WeightEnvironment {
    WeightEnvironment::new(config(p, xi, eta, ArithmeticMode::Real), seed, extent).unwrap()
}

/// Integer laws cycled through by the randomized instance loops.
pub const INT_LAWS: [&str; 4] = ["bernoulli:0.5", "geom:0.4", "const:1", "geom:0.7"];

/// Deterministic instance parameters for loop index `k`.
pub fn instance(k: u64) -> (f64, &'static str, &'static str, u64) {
    let ps = [0.2, 0.5, 0.7, 0.9];
    let p = ps[(k % 4) as usize];
    let xi = INT_LAWS[((k / 4) % 4) as usize];
    let eta = INT_LAWS[((k / 16) % 4) as usize];
    (p, xi, eta, 1000 + k)
}
