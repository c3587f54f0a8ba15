//! N-attempt reliability with delay violations.
//!
//! Every attempt ends in one of three outcomes: decoded (p₁p₂), NACK fed back
//! (`p_feed`), or timeout (`p_timeout`). A packet delivered on attempt `j`
//! after `k` timeouts and `j−1−k` feedbacks has a deterministic delay from
//! [`DelayBudget::deterministic_delay`]; the stochastic queueing delay must
//! fit in what is left of `d_max`, which fails with probability
//! `e^{−θ·slack}`.

use alloc::vec::Vec;

use serde::Serialize;

use crate::delay::DelayBudget;
use crate::error::{check_probability, Error, Result};
use crate::numeric::{binomial, sum_descending};
use crate::scenario::Scenario;

/// Outcome probabilities of a single attempt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttemptEventProbs {
    pub p_success: f64,
    pub p_timeout: f64,
    pub p_feed: f64,
}

impl AttemptEventProbs {
    /// `1 − p₁p₂` written as the sum of its two failure branches, which keeps
    /// precision when p₁p₂ is close to one.
    pub fn p_failure(&self) -> f64 {
        self.p_timeout + self.p_feed
    }
}

pub fn attempt_probs(p1: f64, p2: f64, p3: f64) -> Result<AttemptEventProbs> {
    check_probability("p1", p1)?;
    check_probability("p2", p2)?;
    check_probability("p3", p3)?;
    Ok(AttemptEventProbs {
        p_success: p1 * p2,
        p_timeout: (1.0 - p1) + p1 * (1.0 - p2) * (1.0 - p3),
        p_feed: p1 * (1.0 - p2) * p3,
    })
}

/// Delay violation probability `min(1, e^{−θ·slack})`; exactly 1 when the
/// slack is not positive. `theta = +∞` is allowed and gives the saturation
/// limit.
pub fn dvp(theta: f64, slack_ms: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::OutOfRange {
            field: "theta",
            range: "(0,inf)",
            value: theta,
        });
    }
    if !(slack_ms > 0.0) {
        return Ok(1.0);
    }
    Ok(libm::exp(-theta * slack_ms).min(1.0))
}

/// `1 − dvp`, computed without cancellation for small `θ·slack`.
fn dvp_complement(theta: f64, slack_ms: f64) -> f64 {
    if !(slack_ms > 0.0) {
        0.0
    } else {
        -libm::expm1(-theta * slack_ms)
    }
}

/// One delivery path: success on `attempt` after `timeouts` timeouts and
/// `feedbacks` NACKs (all orderings merged).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathTerm {
    pub attempt: u32,
    pub timeouts: u32,
    pub feedbacks: u32,
    /// `C(j−1,k)·p_feed^{j−1−k}·p_timeout^k·p₁p₂`.
    pub probability: f64,
    pub slack: f64,
    pub dvp: f64,
    pub dvp_complement: f64,
}

impl PathTerm {
    pub fn contribution(&self) -> f64 {
        self.probability * self.dvp_complement
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityResult {
    pub theta: f64,
    pub n: u32,
    pub value: f64,
    /// `1 − value`, accumulated from non-negative complement terms.
    pub unreliability: f64,
    /// `R(j) − R(j−1)` for `j = 1..=n`.
    pub per_attempt_terms: Vec<f64>,
    pub per_path_terms: Vec<PathTerm>,
}

/// Path terms of the closed form for attempts `1..=n`.
pub fn path_terms(
    budget: &DelayBudget,
    d_max: f64,
    probs: &AttemptEventProbs,
    theta: f64,
    n: u32,
) -> Result<Vec<PathTerm>> {
    dvp(theta, 1.0)?;
    let mut terms = Vec::with_capacity((n as usize * (n as usize + 1)) / 2);
    for attempt in 1..=n {
        for timeouts in 0..attempt {
            let feedbacks = attempt - 1 - timeouts;
            let probability = binomial(attempt - 1, timeouts)
                * libm::pow(probs.p_feed, feedbacks as f64)
                * libm::pow(probs.p_timeout, timeouts as f64)
                * probs.p_success;
            let slack = budget.slack(d_max, attempt, feedbacks, timeouts)?;
            terms.push(PathTerm {
                attempt,
                timeouts,
                feedbacks,
                probability,
                slack,
                dvp: dvp(theta, slack)?,
                dvp_complement: dvp_complement(theta, slack),
            });
        }
    }
    Ok(terms)
}

/// `R(θ, n)` with its per-attempt and per-path decomposition.
pub fn reliability(s: &Scenario, theta: f64, n: u32) -> Result<ReliabilityResult> {
    if n == 0 || n > s.n_max {
        return Err(Error::Attempts { n, n_max: s.n_max });
    }
    let probs = attempt_probs(s.p1, s.p2, s.p3)?;
    let terms = path_terms(&s.budget, s.d_max, &probs, theta, n)?;

    let per_attempt_terms = (1..=n)
        .map(|j| {
            sum_descending(
                terms
                    .iter()
                    .filter(|t| t.attempt == j)
                    .map(PathTerm::contribution)
                    .collect(),
            )
        })
        .collect();
    let value = sum_descending(terms.iter().map(PathTerm::contribution).collect());

    // Exhausted packets plus every delivered-but-late path.
    let mut missing: Vec<f64> = terms.iter().map(|t| t.probability * t.dvp).collect();
    missing.push(libm::pow(probs.p_failure(), n as f64));
    let unreliability = sum_descending(missing);

    Ok(ReliabilityResult {
        theta,
        n,
        value,
        unreliability,
        per_attempt_terms,
        per_path_terms: terms,
    })
}

/// `1 − R(θ, n)` without forming `R`.
pub fn unreliability(s: &Scenario, theta: f64, n: u32) -> Result<f64> {
    Ok(reliability(s, theta, n)?.unreliability)
}

/// `lim θ→∞ R(θ, n)`: channel-only success over paths with positive slack.
pub fn saturation(s: &Scenario, n: u32) -> Result<ReliabilityResult> {
    reliability(s, f64::INFINITY, n)
}
