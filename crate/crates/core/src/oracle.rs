//! Independent checks of the closed forms.
//!
//! - [`enumerate_reliability`] walks every channel-level outcome sequence and
//!   accumulates delay step by step, with no binomial grouping.
//! - [`mc_reliability`] and [`mc_mgf_retx`] simulate the transmission process
//!   with seeded ChaCha streams, one stream per fixed-size batch, so results
//!   do not depend on how batches are spread over threads.
//! - [`queue_trace`] runs the TX and RETX buffers slot by slot.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::capacity::MgfForm;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::scenario::Scenario;

/// Enumeration is exponential in the attempt count.
pub const MAX_ENUMERATED_ATTEMPTS: u32 = 12;

/// Trials per RNG stream.
pub const BATCH_TRIALS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    NackFeedback,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomePath {
    pub outcomes: Vec<Outcome>,
    pub path_probability: f64,
    /// Delay of every attempt on the path plus its feedback/timeout waits.
    pub total_deterministic_delay: f64,
}

impl OutcomePath {
    pub fn delivered(&self) -> bool {
        self.outcomes.last() == Some(&Outcome::Success)
    }
}

fn check_attempts(s: &Scenario, n: u32) -> Result<()> {
    if n == 0 || n > s.n_max {
        return Err(Error::Attempts { n, n_max: s.n_max });
    }
    if n > MAX_ENUMERATED_ATTEMPTS {
        return Err(Error::Attempts {
            n,
            n_max: MAX_ENUMERATED_ATTEMPTS,
        });
    }
    Ok(())
}

/// Every outcome sequence of up to `n` attempts: delivered paths end in
/// their single success, exhausted paths are `n` failures long.
pub fn enumerate_paths(s: &Scenario, n: u32) -> Result<Vec<OutcomePath>> {
    check_attempts(s, n)?;
    let success = s.p1 * s.p2;
    let feedback = s.p1 * (1.0 - s.p2) * s.p3;
    let timeout = (1.0 - s.p1) + s.p1 * (1.0 - s.p2) * (1.0 - s.p3);
    let b = &s.budget;
    let per_attempt = b.d_gnb + b.d_ue + b.t_tx;

    let mut done = Vec::new();
    let mut frontier = vec![OutcomePath {
        outcomes: Vec::new(),
        path_probability: 1.0,
        total_deterministic_delay: 0.0,
    }];
    for attempt in 1..=n {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for path in frontier {
            let delay = path.total_deterministic_delay + per_attempt;
            for (outcome, p, wait) in [
                (Outcome::Success, success, 0.0),
                (Outcome::NackFeedback, feedback, b.d_feed),
                (Outcome::Timeout, timeout, b.d_timeout),
            ] {
                let mut outcomes = path.outcomes.clone();
                outcomes.push(outcome);
                let extended = OutcomePath {
                    outcomes,
                    path_probability: path.path_probability * p,
                    total_deterministic_delay: delay + wait,
                };
                if outcome == Outcome::Success || attempt == n {
                    done.push(extended);
                } else {
                    next.push(extended);
                }
            }
        }
        frontier = next;
    }
    Ok(done)
}

/// Reliability by explicit tree walk over the four channel events of each
/// attempt (PDCCH lost, data decoded, NACK delivered, NACK lost).
pub fn enumerate_reliability(s: &Scenario, theta: f64, n: u32) -> Result<f64> {
    check_attempts(s, n)?;
    if !(theta > 0.0) {
        return Err(Error::OutOfRange {
            field: "theta",
            range: "(0,inf)",
            value: theta,
        });
    }

    fn walk(s: &Scenario, theta: f64, attempts_left: u32, probability: f64, elapsed: f64) -> f64 {
        if attempts_left == 0 || probability == 0.0 {
            return 0.0;
        }
        let b = &s.budget;
        let elapsed = elapsed + b.d_gnb + b.d_ue + b.t_tx;
        let left = s.d_max - elapsed;
        let on_time = if left > 0.0 {
            1.0 - libm::exp(-theta * left)
        } else {
            0.0
        };

        let decoded = probability * s.p1 * s.p2 * on_time;
        let control_lost = walk(
            s,
            theta,
            attempts_left - 1,
            probability * (1.0 - s.p1),
            elapsed + b.d_timeout,
        );
        let nack = walk(
            s,
            theta,
            attempts_left - 1,
            probability * s.p1 * (1.0 - s.p2) * s.p3,
            elapsed + b.d_feed,
        );
        let nack_lost = walk(
            s,
            theta,
            attempts_left - 1,
            probability * s.p1 * (1.0 - s.p2) * (1.0 - s.p3),
            elapsed + b.d_timeout,
        );
        decoded + control_lost + nack + nack_lost
    }

    Ok(walk(s, theta, n, 1.0, 0.0))
}

/// Seeded Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over √trials; `None` for a single trial.
    pub standard_error: Option<f64>,
    pub trials: u64,
    pub rng_seed: u64,
}

impl McEstimate {
    /// From a count of successes out of `trials` Bernoulli draws.
    pub fn from_count(successes: u64, trials: u64, rng_seed: u64) -> Self {
        let n = trials as f64;
        let k = successes as f64;
        Self::from_moments(k, k, trials, rng_seed).with_mean(k / n)
    }

    /// From the sum and sum of squares of `trials` samples.
    pub fn from_moments(sum: f64, sum_sq: f64, trials: u64, rng_seed: u64) -> Self {
        let n = trials as f64;
        let mean = sum / n;
        let standard_error = (trials > 1).then(|| {
            let variance = ((sum_sq - sum * mean) / (n - 1.0)).max(0.0);
            libm::sqrt(variance / n)
        });
        Self {
            mean,
            standard_error,
            trials,
            rng_seed,
        }
    }

    fn with_mean(mut self, mean: f64) -> Self {
        self.mean = mean;
        self
    }

    /// `(estimate − reference) / SE`; `None` when SE is undefined or zero.
    pub fn z_score(&self, reference: f64) -> Option<f64> {
        self.standard_error
            .filter(|&se| se > 0.0)
            .map(|se| (self.mean - reference) / se)
    }
}

/// Splits `trials` into `(batch index, trials in batch)` pairs.
pub fn batches(trials: u64) -> impl Iterator<Item = (u64, u64)> {
    let full = trials / BATCH_TRIALS;
    let rest = trials % BATCH_TRIALS;
    (0..full)
        .map(|i| (i, BATCH_TRIALS))
        .chain((rest > 0).then_some((full, rest)))
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Successful deliveries in one batch of simulated packets.
///
/// Each packet walks the attempt process up to `n` times; a decoded packet
/// then draws one exponential(θ) queueing delay and counts if the total stays
/// within `d_max`.
pub fn reliability_batch(s: &Scenario, theta: f64, n: u32, seed: u64, batch: u64, trials: u64) -> u64 {
    let mut rng = batch_rng(seed, batch);
    let b = &s.budget;
    let per_attempt = b.per_attempt();
    let mut delivered = 0;
    for _ in 0..trials {
        let mut elapsed = 0.0;
        for _ in 0..n {
            elapsed += per_attempt;
            if rng.random::<f64>() >= s.p1 {
                elapsed += b.d_timeout;
                continue;
            }
            if rng.random::<f64>() < s.p2 {
                let u: f64 = rng.random();
                let queueing = -libm::log1p(-u) / theta;
                if elapsed + queueing <= s.d_max {
                    delivered += 1;
                }
                break;
            }
            elapsed += if rng.random::<f64>() < s.p3 {
                b.d_feed
            } else {
                b.d_timeout
            };
        }
    }
    delivered
}

fn check_mc(theta: f64, trials: u64) -> Result<()> {
    if !(theta > 0.0) || theta.is_infinite() {
        return Err(Error::OutOfRange {
            field: "theta",
            range: "(0,inf)",
            value: theta,
        });
    }
    if trials == 0 {
        return Err(Error::OutOfRange {
            field: "trials",
            range: "[1,inf)",
            value: 0.0,
        });
    }
    Ok(())
}

/// Rejects the inputs [`mc_reliability`] cannot simulate.
pub fn check_reliability_inputs(s: &Scenario, theta: f64, n: u32, trials: u64) -> Result<()> {
    if n == 0 || n > s.n_max {
        return Err(Error::Attempts { n, n_max: s.n_max });
    }
    check_mc(theta, trials)
}

/// Fraction of packets delivered within `d_max`, single-threaded.
pub fn mc_reliability(s: &Scenario, theta: f64, n: u32, trials: u64, seed: u64) -> Result<McEstimate> {
    check_reliability_inputs(s, theta, n, trials)?;
    let delivered = batches(trials)
        .map(|(batch, count)| reliability_batch(s, theta, n, seed, batch, count))
        .sum();
    Ok(McEstimate::from_count(delivered, trials, seed))
}

/// Sum and sum of squares of `e^{−θ·service}` over one batch of RETX packets.
///
/// A packet decoded after `k` failures is served according to `form` (see
/// [`MgfForm`]); a packet that exhausts all `n` attempts is served nothing.
#[allow(clippy::too_many_arguments)]
pub fn mgf_batch(
    p1: f64,
    p2: f64,
    service_rate: f64,
    theta: f64,
    n: u32,
    form: MgfForm,
    seed: u64,
    batch: u64,
    trials: u64,
) -> (f64, f64) {
    let mut rng = batch_rng(seed, batch);
    let (mut sum, mut sum_sq) = (CompensatedSum::new(), CompensatedSum::new());
    for _ in 0..trials {
        let mut served = 0.0;
        for k in 0..n {
            let decoded = rng.random::<f64>() < p1 && rng.random::<f64>() < p2;
            if decoded {
                served = match (form, k) {
                    (MgfForm::Published, 0) => service_rate,
                    _ => (n - k) as f64 * service_rate,
                };
                break;
            }
        }
        let x = libm::exp(-theta * served);
        sum.add(x);
        sum_sq.add(x * x);
    }
    (sum.value(), sum_sq.value())
}

pub fn mc_mgf_retx(
    p1: f64,
    p2: f64,
    service_rate: f64,
    theta: f64,
    n: u32,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_mc(theta, trials)?;
    if n == 0 {
        return Err(Error::OutOfRange {
            field: "n",
            range: "[1,inf)",
            value: 0.0,
        });
    }
    let (mut sum, mut sum_sq) = (CompensatedSum::new(), CompensatedSum::new());
    for (batch, count) in batches(trials) {
        let (s1, s2) = mgf_batch(p1, p2, service_rate, theta, n, MgfForm::Published, seed, batch, count);
        sum.add(s1);
        sum_sq.add(s2);
    }
    Ok(McEstimate::from_moments(sum.value(), sum_sq.value(), trials, seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueBehaviour {
    Bounded,
    Drifting,
}

/// Queue lengths in bits at the end of each slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueTrace {
    pub tx: Vec<f64>,
    pub retx: Vec<f64>,
    /// Packet size in bits (`S`), the granularity of service.
    pub packet_bits: f64,
}

impl QueueTrace {
    pub fn tx_behaviour(&self) -> QueueBehaviour {
        classify(&self.tx, self.packet_bits)
    }

    pub fn retx_behaviour(&self) -> QueueBehaviour {
        classify(&self.retx, self.packet_bits)
    }

    /// Fraction of slots the TX buffer ends non-empty.
    pub fn tx_busy_fraction(&self) -> f64 {
        busy_fraction(&self.tx)
    }

    pub fn retx_busy_fraction(&self) -> f64 {
        busy_fraction(&self.retx)
    }
}

fn busy_fraction(trace: &[f64]) -> f64 {
    if trace.is_empty() {
        return 0.0;
    }
    trace.iter().filter(|&&q| q > 0.0).count() as f64 / trace.len() as f64
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Drifting when the last-quartile mean exceeds twice the second-quartile
/// mean by more than `granularity`; bounded otherwise.
pub fn classify(trace: &[f64], granularity: f64) -> QueueBehaviour {
    let q = trace.len() / 4;
    let mid = mean(&trace[q..2 * q]);
    let last = mean(&trace[trace.len() - q..]);
    if last > 2.0 * mid + granularity {
        QueueBehaviour::Drifting
    } else {
        QueueBehaviour::Bounded
    }
}

/// Slot-level TX and RETX buffer simulation under a constant arrival of
/// `lambda_arrival` bits per slot.
///
/// TX removes up to `S` bits whenever an attempt is decoded. RETX holds its
/// head-of-line packet of `S` bits for one attempt per slot until it is
/// decoded or has used `n_max` attempts, then removes it.
pub fn queue_trace(s: &Scenario, lambda_arrival: f64, slots: usize, seed: u64) -> Result<QueueTrace> {
    if !(lambda_arrival >= 0.0) || lambda_arrival.is_infinite() {
        return Err(Error::OutOfRange {
            field: "lambda_arrival",
            range: "[0,inf)",
            value: lambda_arrival,
        });
    }
    if slots == 0 {
        return Err(Error::OutOfRange {
            field: "slots",
            range: "[1,inf)",
            value: 0.0,
        });
    }
    let mut tx_rng = batch_rng(seed, 0);
    let mut retx_rng = batch_rng(seed, 1);
    let packet = s.service_rate;
    let success = s.p1 * s.p2;

    let mut tx = Vec::with_capacity(slots);
    let mut retx = Vec::with_capacity(slots);
    let (mut q_tx, mut q_retx) = (0.0f64, 0.0f64);
    let mut attempts = 0;
    for _ in 0..slots {
        q_tx += lambda_arrival;
        if q_tx > 0.0 && tx_rng.random::<f64>() < success {
            q_tx = (q_tx - packet).max(0.0);
        }
        tx.push(q_tx);

        q_retx += lambda_arrival;
        if q_retx > 0.0 {
            attempts += 1;
            if retx_rng.random::<f64>() < success || attempts >= s.n_max {
                q_retx = (q_retx - packet).max(0.0);
                attempts = 0;
            }
        }
        retx.push(q_retx);
    }
    Ok(QueueTrace {
        tx,
        retx,
        packet_bits: packet,
    })
}
