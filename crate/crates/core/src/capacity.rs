//! Effective capacity of the TX and RETX buffers.
//!
//! `EC(θ) = −log 𝔼[e^{−θ·service}] / (N·θ)`. The TX buffer serves `S` with
//! probability p₁p₂ and nothing otherwise. The RETX buffer retries up to `N`
//! times; its service distribution has one atom per attempt on which the
//! packet is decoded plus a zero-service atom for discarded packets.

use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{check_non_negative, check_probability, Error, Result};
use crate::reliability::attempt_probs;
use crate::scenario::Scenario;

/// Which service decomposition the RETX moment generating function uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MgfForm {
    /// Decoded on the first attempt serves `S`; decoded after `k ≥ 1`
    /// failures serves `(N−k)·S`. This is the form behind the published
    /// capacity curves.
    #[default]
    Published,
    /// Decoded after `k ≥ 0` failures serves `(N−k)·S`, first attempt
    /// included.
    Expectation,
}

/// Weight and service of each atom of the RETX service distribution.
///
/// Weights are kept as logarithms so `(1 − p₁p₂)^N` cannot underflow.
pub fn service_atoms(p_success: f64, service_rate: f64, n: u32, form: MgfForm) -> Vec<(f64, f64)> {
    let ln_fail = libm::log(1.0 - p_success);
    let ln_success = libm::log(p_success);
    let mut atoms = Vec::with_capacity(n as usize + 1);
    atoms.push((n as f64 * ln_fail, 0.0));
    for k in 0..n {
        let served = match (form, k) {
            (MgfForm::Published, 0) => service_rate,
            _ => (n - k) as f64 * service_rate,
        };
        let ln_w = if k == 0 {
            ln_success
        } else {
            ln_success + k as f64 * ln_fail
        };
        atoms.push((ln_w, served));
    }
    atoms
}

/// `log 𝔼[e^{−θ·service}]`.
///
/// Works on `g − 1 = Σ w·expm1(−θs)` while `g` is near one, and switches to
/// a log-sum-exp once the expectation is small.
fn log_mgf(atoms: &[(f64, f64)], theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let g_minus_one: f64 = atoms
        .iter()
        .map(|&(ln_w, s)| libm::exp(ln_w) * libm::expm1(-theta * s))
        .sum();
    if g_minus_one > -0.5 {
        return libm::log1p(g_minus_one);
    }
    let peak = atoms
        .iter()
        .map(|&(ln_w, s)| ln_w - theta * s)
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    let rest: f64 = atoms.iter().map(|&(ln_w, s)| libm::exp(ln_w - theta * s - peak)).sum();
    peak + libm::log(rest)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EcResult {
    pub theta: f64,
    pub n: u32,
    /// Effective capacity in bpcu.
    pub value: f64,
    /// The expectation inside the logarithm.
    pub mgf: f64,
    pub log_mgf: f64,
}

fn check_inputs(p1: f64, p2: f64, service_rate: f64, theta: f64, n: u32) -> Result<f64> {
    check_probability("p1", p1)?;
    check_probability("p2", p2)?;
    check_non_negative("service_rate_S", service_rate)?;
    if !(theta >= 0.0) || theta.is_infinite() {
        return Err(Error::OutOfRange {
            field: "theta",
            range: "[0,inf)",
            value: theta,
        });
    }
    if n == 0 {
        return Err(Error::OutOfRange {
            field: "n",
            range: "[1,inf)",
            value: 0.0,
        });
    }
    Ok(p1 * p2)
}

/// The RETX expectation `𝔼[e^{−θ S_RETX}]`; `theta = 0` gives 1.
pub fn ec_mgf_retx(p1: f64, p2: f64, service_rate: f64, theta: f64, n: u32, form: MgfForm) -> Result<f64> {
    let ps = check_inputs(p1, p2, service_rate, theta, n)?;
    Ok(libm::exp(log_mgf(&service_atoms(ps, service_rate, n, form), theta)))
}

pub fn ec_retx_with(p1: f64, p2: f64, service_rate: f64, theta: f64, n: u32, form: MgfForm) -> Result<EcResult> {
    let ps = check_inputs(p1, p2, service_rate, theta, n)?;
    if theta == 0.0 {
        return Err(Error::OutOfRange {
            field: "theta",
            range: "(0,inf)",
            value: theta,
        });
    }
    let ln_g = log_mgf(&service_atoms(ps, service_rate, n, form), theta);
    Ok(EcResult {
        theta,
        n,
        value: -ln_g / (n as f64 * theta),
        mgf: libm::exp(ln_g),
        log_mgf: ln_g,
    })
}

/// RETX buffer effective capacity over `n` attempts (published form).
pub fn ec_retx(p1: f64, p2: f64, service_rate: f64, theta: f64, n: u32) -> Result<EcResult> {
    ec_retx_with(p1, p2, service_rate, theta, n, MgfForm::Published)
}

/// TX buffer effective capacity `−log[(1−p₁p₂) + p₁p₂e^{−θS}]/θ`.
pub fn ec_tx(p1: f64, p2: f64, service_rate: f64, theta: f64) -> Result<EcResult> {
    ec_retx_with(p1, p2, service_rate, theta, 1, MgfForm::Published)
}

/// `lim θ→0⁺ EC`: the mean service divided by `n`.
pub fn mean_service_rate(p_success: f64, service_rate: f64, n: u32, form: MgfForm) -> f64 {
    service_atoms(p_success, service_rate, n, form)
        .iter()
        .map(|&(ln_w, s)| libm::exp(ln_w) * s)
        .sum::<f64>()
        / n as f64
}

/// Probability that a packet uses exactly `j` attempts, `j = 1..=n_max`.
pub fn attempt_count_distribution(p_success: f64, n_max: u32) -> Vec<f64> {
    let fail = 1.0 - p_success;
    (1..=n_max)
        .map(|j| {
            let prior = libm::pow(fail, (j - 1) as f64);
            if j < n_max {
                prior * p_success
            } else {
                prior
            }
        })
        .collect()
}

pub fn expected_attempts(p_success: f64, n_max: u32) -> f64 {
    attempt_count_distribution(p_success, n_max)
        .iter()
        .enumerate()
        .map(|(i, p)| (i + 1) as f64 * p)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub lambda_arrival: f64,
    pub mu_tx: f64,
    pub mu_retx: f64,
    pub expected_attempts: f64,
    pub stable_tx: bool,
    pub stable_retx: bool,
}

/// Queue stability for a constant arrival rate in bpcu.
///
/// TX serves `p₁p₂·S` on average. Each RETX packet holds the buffer for the
/// expected number of attempts, so `μ_RETX = p₁p₂·S / 𝔼[attempts]`.
pub fn stability_check(s: &Scenario, lambda_arrival: f64) -> Result<StabilityReport> {
    check_non_negative("lambda_arrival", lambda_arrival)?;
    let probs = attempt_probs(s.p1, s.p2, s.p3)?;
    let expected_attempts = expected_attempts(probs.p_success, s.n_max);
    let mu_tx = probs.p_success * s.service_rate;
    let mu_retx = mu_tx / expected_attempts;
    Ok(StabilityReport {
        lambda_arrival,
        mu_tx,
        mu_retx,
        expected_attempts,
        stable_tx: lambda_arrival < mu_tx || lambda_arrival == 0.0,
        stable_retx: lambda_arrival < mu_retx || lambda_arrival == 0.0,
    })
}
