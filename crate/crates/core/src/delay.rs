//! Deterministic delay accounting for multi-attempt timelines.

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, Error, Result};

/// Slot length at numerology 1 (30 kHz subcarrier spacing).
pub const SLOT_MS: f64 = 0.5;
/// One OFDM symbol at numerology 1 with normal cyclic prefix.
pub const OFDM_SYMBOL_MS: f64 = SLOT_MS / 14.0;
pub const GNB_PROCESSING_SYMBOLS: f64 = 7.0;
pub const UE_PROCESSING_SYMBOLS: f64 = 4.5;

/// Per-attempt and per-event delay components, all in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayBudget {
    pub d_gnb: f64,
    pub d_ue: f64,
    pub t_tx: f64,
    pub d_feed: f64,
    pub d_timeout: f64,
}

impl DelayBudget {
    pub fn new(d_gnb: f64, d_ue: f64, t_tx: f64, d_feed: f64, d_timeout: f64) -> Result<Self> {
        Ok(Self {
            d_gnb: check_non_negative("d_gnb", d_gnb)?,
            d_ue: check_non_negative("d_ue", d_ue)?,
            t_tx: check_non_negative("t_tx", t_tx)?,
            d_feed: check_non_negative("d_feed", d_feed)?,
            d_timeout: check_non_negative("d_timeout", d_timeout)?,
        })
    }

    /// gNB and UE processing from the numerology-1 symbol counts; feedback is
    /// one slot and the timeout one slot past it.
    pub fn numerology1(t_tx: f64) -> Self {
        Self {
            d_gnb: GNB_PROCESSING_SYMBOLS * OFDM_SYMBOL_MS,
            d_ue: UE_PROCESSING_SYMBOLS * OFDM_SYMBOL_MS,
            t_tx,
            d_feed: SLOT_MS,
            d_timeout: 2.0 * SLOT_MS,
        }
    }

    /// `d_gnb + d_ue + t_tx`: what every attempt costs.
    pub fn per_attempt(&self) -> f64 {
        self.d_gnb + self.d_ue + self.t_tx
    }

    /// `n·(d_gnb + d_ue + t_tx) + a1·d_feed + a2·d_timeout`.
    ///
    /// Each of the `n − 1` failed attempts ends in exactly one feedback or
    /// timeout event, so `a1 + a2 <= n − 1`.
    pub fn deterministic_delay(&self, n: u32, a1: u32, a2: u32) -> Result<f64> {
        if n == 0 || a1.checked_add(a2).is_none_or(|events| events > n - 1) {
            return Err(Error::EventCount { n, a1, a2 });
        }
        Ok(n as f64 * self.per_attempt() + a1 as f64 * self.d_feed + a2 as f64 * self.d_timeout)
    }

    /// Signed time left under `d_max`; negative means the path is dead.
    pub fn slack(&self, d_max: f64, n: u32, a1: u32, a2: u32) -> Result<f64> {
        Ok(d_max - self.deterministic_delay(n, a1, a2)?)
    }
}
