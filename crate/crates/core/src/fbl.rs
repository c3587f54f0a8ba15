//! Normal-approximation channel math for the short-blocklength regime.
//!
//! For an AWGN channel at a given SNR the achievable rate with `r` channel
//! uses and block error probability `ε` is approximated by
//! `S ≈ C − Q⁻¹(ε)·√(V/r)`, with `C = log₂(1+SNR)` and
//! `V = (log₂e)²·(1 − (1+SNR)⁻²)`. Inverting that relation gives the channel
//! uses needed for `L` information bits.

use serde::Serialize;

use crate::error::{check_non_negative, check_positive, Error, Result};

const LOG2_E_SQ: f64 = core::f64::consts::LOG2_E * core::f64::consts::LOG2_E;

/// Shannon capacity `log₂(1+snr)` in bits per channel use.
pub fn capacity(snr: f64) -> Result<f64> {
    check_non_negative("snr", snr)?;
    Ok(libm::log1p(snr) * core::f64::consts::LOG2_E)
}

/// Channel dispersion in bpcu².
pub fn dispersion(snr: f64) -> Result<f64> {
    check_non_negative("snr", snr)?;
    // 1 − (1+snr)⁻² = snr(2+snr)/(1+snr)², exact at snr = 0
    let one_plus = 1.0 + snr;
    Ok(LOG2_E_SQ * (snr * (2.0 + snr) / (one_plus * one_plus)))
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Inverse of [`q_function`] on `(0, 1)`.
///
/// Bisection on `erfc` down to adjacent floats; `Q` of the result matches `p`
/// to about 1e-15 relative.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange {
            field: "p",
            range: "(0,1)",
            value: p,
        });
    }
    // Q(-40) rounds to 1 and Q(40) underflows to 0.
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let q = q_function(mid);
        if q == p {
            return Ok(mid);
        }
        if q > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (qlo, qhi) = (q_function(lo), q_function(hi));
    Ok(if libm::fabs(qlo - p) <= libm::fabs(qhi - p) {
        lo
    } else {
        hi
    })
}

/// Rate from the normal approximation. Negative values mean the `(r, ε)`
/// pair cannot carry any payload; they are reported, not clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AchievableRate {
    pub bpcu: f64,
    pub infeasible: bool,
}

pub fn achievable_rate(snr: f64, channel_uses: f64, epsilon: f64) -> Result<AchievableRate> {
    ChannelModel::new(snr, epsilon)?.achievable_rate(channel_uses)
}

pub fn required_blocklength(snr: f64, payload_bits: f64, epsilon: f64) -> Result<f64> {
    ChannelModel::new(snr, epsilon)?.required_blocklength(payload_bits)
}

/// `r / B` converted to milliseconds.
pub fn transmission_time(channel_uses: f64, bandwidth_hz: f64) -> Result<f64> {
    check_positive("r", channel_uses)?;
    check_positive("bandwidth_B", bandwidth_hz)?;
    Ok(channel_uses / bandwidth_hz * 1e3)
}

/// Static AWGN channel at one SNR and target error probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelModel {
    pub snr: f64,
    pub capacity: f64,
    pub dispersion: f64,
    pub epsilon: f64,
    q_inv: f64,
}

impl ChannelModel {
    pub fn new(snr: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::OutOfRange {
                field: "epsilon",
                range: "(0,1)",
                value: epsilon,
            });
        }
        Ok(Self {
            snr,
            capacity: capacity(snr)?,
            dispersion: dispersion(snr)?,
            epsilon,
            q_inv: q_inverse(epsilon)?,
        })
    }

    pub fn q_inverse_epsilon(&self) -> f64 {
        self.q_inv
    }

    pub fn achievable_rate(&self, channel_uses: f64) -> Result<AchievableRate> {
        check_positive("r", channel_uses)?;
        let bpcu = self.capacity - self.q_inv * libm::sqrt(self.dispersion / channel_uses);
        Ok(AchievableRate {
            bpcu,
            infeasible: bpcu < 0.0,
        })
    }

    /// Channel uses needed for `payload_bits`, as a real number.
    ///
    /// Closed-form root of `C·r − Q⁻¹(ε)·√(V·r) = L` in `√r`. For ε < 0.5
    /// this is the usual `L/C + Q²V/(2C²)·(1 + √(1 + 4LC/(VQ²)))`; the sign of
    /// the square-root branch follows `Q⁻¹(ε)` so ε > 0.5 stays consistent.
    pub fn required_blocklength(&self, payload_bits: f64) -> Result<f64> {
        check_positive("payload_L", payload_bits)?;
        if self.capacity <= 0.0 {
            return Err(Error::ZeroCapacity);
        }
        let c = self.capacity;
        let base = payload_bits / c;
        let qq_v = self.q_inv * self.q_inv * self.dispersion;
        if qq_v == 0.0 {
            return Ok(base);
        }
        let root = libm::sqrt(1.0 + 4.0 * payload_bits * c / qq_v);
        let branch = if self.q_inv > 0.0 { 1.0 + root } else { 1.0 - root };
        Ok(base + qq_v / (2.0 * c * c) * branch)
    }
}
