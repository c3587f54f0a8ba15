use rayon::prelude::*;
use serde::Serialize;
use urllc_ec_core::oracle::{batches, check_reliability_inputs, reliability_batch, McEstimate};
use urllc_ec_core::reliability::reliability;
use urllc_ec_core::{Result, Scenario};

/// `mc_reliability` fanned out over `pool`. Batches carry their own RNG
/// streams, so the estimate does not depend on the worker count.
pub fn mc_reliability_parallel(
    s: &Scenario,
    theta: f64,
    n: u32,
    trials: u64,
    seed: u64,
    pool: &rayon::ThreadPool,
) -> Result<McEstimate> {
    check_reliability_inputs(s, theta, n, trials)?;
    let work: Vec<(u64, u64)> = batches(trials).collect();
    let delivered: u64 = pool.install(|| {
        work.par_iter()
            .map(|&(batch, count)| reliability_batch(s, theta, n, seed, batch, count))
            .sum()
    });
    Ok(McEstimate::from_count(delivered, trials, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub estimate: f64,
    pub standard_error: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    pub analytic_value: f64,
    pub z_score: Option<f64>,
}

pub fn simulate(
    s: &Scenario,
    theta: f64,
    n: u32,
    trials: u64,
    seed: u64,
    pool: &rayon::ThreadPool,
) -> Result<SimulationReport> {
    let est = mc_reliability_parallel(s, theta, n, trials, seed, pool)?;
    let analytic_value = reliability(s, theta, n)?.value;
    Ok(SimulationReport {
        estimate: est.mean,
        standard_error: est.standard_error,
        trials,
        seed,
        analytic_value,
        z_score: est.z_score(analytic_value),
    })
}
