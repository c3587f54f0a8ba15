//! Input data model shared by every analysis.
//!
//! A [`ScenarioSpec`] is exactly what a scenario file holds: the given
//! fields, nothing derived. [`Scenario::from_spec`] validates it, applies
//! defaults and derives the service rate `S` and transmission time `T`.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::delay::{DelayBudget, GNB_PROCESSING_SYMBOLS, OFDM_SYMBOL_MS, SLOT_MS, UE_PROCESSING_SYMBOLS};
use crate::error::{check_non_negative, check_positive, check_probability, Error, Result};
use crate::fbl::{self, ChannelModel};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const DEFAULT_PAYLOAD_BITS: f64 = 256.0;
pub const DEFAULT_BANDWIDTH_HZ: f64 = 20e6;
pub const DEFAULT_EPSILON: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilityParams {
    /// Relative velocity in m/s.
    pub velocity_v: f64,
    /// Carrier frequency in Hz.
    pub carrier_fc: f64,
}

/// `T_C ≈ √(9/(16π))·c/(v·f_c)`, in milliseconds.
pub fn coherence_time(m: &MobilityParams) -> Result<f64> {
    check_positive("velocity_v", m.velocity_v)?;
    check_positive("carrier_fc", m.carrier_fc)?;
    let factor = libm::sqrt(9.0 / (16.0 * core::f64::consts::PI));
    Ok(factor * SPEED_OF_LIGHT / (m.velocity_v * m.carrier_fc) * 1e3)
}

/// Values pinned directly instead of coming from PHY simulation or
/// finite-blocklength derivation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    #[serde(
        rename = "service_rate_S",
        alias = "service_rate_s",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub service_rate_s: Option<f64>,
    /// p₁·p₂; when set, `p2` is derived as `success_product / p1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_product: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Scenario file contents. Optional fields are `None` when absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_case: Option<String>,
    pub p1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<f64>,
    pub p3: f64,
    #[serde(
        rename = "service_rate_S",
        alias = "service_rate_s",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub service_rate_s: Option<f64>,
    pub d_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_gnb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_ue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_feed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_timeout: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_tx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_th: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(
        rename = "bandwidth_B",
        alias = "bandwidth_b",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub bandwidth_b: Option<f64>,
    #[serde(
        rename = "payload_L",
        alias = "payload_l",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub payload_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobility: Option<MobilityParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
}

/// Where a derived quantity came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Given,
    Calibrated,
    FiniteBlocklength,
    Derived,
}

/// A validated scenario with every quantity resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub use_case: Option<String>,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// Service rate `S` in bpcu.
    pub service_rate: f64,
    pub d_max: f64,
    pub budget: DelayBudget,
    pub n_max: u32,
    pub r_th: f64,
    /// Allowed EC degradation; `None` means 1% of the supremum.
    pub rho: Option<f64>,
    pub bandwidth: f64,
    pub payload_bits: f64,
    pub snr: Option<f64>,
    pub epsilon: f64,
    pub mobility: Option<MobilityParams>,
    pub p2_source: Source,
    pub service_rate_source: Source,
    pub t_tx_source: Source,
    #[serde(skip)]
    spec: ScenarioSpec,
}

impl Scenario {
    pub fn from_spec(spec: ScenarioSpec) -> Result<Self> {
        let p1 = check_probability("p1", spec.p1)?;
        let p3 = check_probability("p3", spec.p3)?;
        let calibration = spec.calibration.clone().unwrap_or_default();

        let (p2, p2_source) = match (spec.p2, calibration.success_product) {
            (Some(_), Some(_)) => {
                return Err(Error::Conflict {
                    field: "p2",
                    detail: "set either p2 or calibration.success_product",
                })
            }
            (Some(p2), None) => (check_probability("p2", p2)?, Source::Given),
            (None, Some(product)) => {
                check_probability("calibration.success_product", product)?;
                if product > p1 {
                    return Err(Error::OutOfRange {
                        field: "calibration.success_product",
                        range: "[0,p1]",
                        value: product,
                    });
                }
                let p2 = if p1 == 0.0 { 0.0 } else { (product / p1).min(1.0) };
                (p2, Source::Calibrated)
            }
            (None, None) => {
                return Err(Error::Missing {
                    field: "p2",
                    hint: "give p2 or calibration.success_product",
                })
            }
        };

        let d_max = check_positive("d_max", spec.d_max)?;
        let n_max = spec.n_max.unwrap_or(1);
        if n_max == 0 {
            return Err(Error::OutOfRange {
                field: "n_max",
                range: "[1,inf)",
                value: 0.0,
            });
        }
        let r_th = match spec.r_th {
            Some(r) => {
                if !(0.0..1.0).contains(&r) {
                    return Err(Error::OutOfRange {
                        field: "r_th",
                        range: "[0,1)",
                        value: r,
                    });
                }
                r
            }
            None => 0.0,
        };
        let rho = spec.rho.map(|r| check_positive("rho", r)).transpose()?;
        let bandwidth = check_positive("bandwidth_B", spec.bandwidth_b.unwrap_or(DEFAULT_BANDWIDTH_HZ))?;
        let payload_bits = check_positive("payload_L", spec.payload_l.unwrap_or(DEFAULT_PAYLOAD_BITS))?;
        let epsilon = spec.epsilon.unwrap_or(DEFAULT_EPSILON);
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::OutOfRange {
                field: "epsilon",
                range: "(0,1)",
                value: epsilon,
            });
        }
        let snr = spec.snr.map(|s| check_positive("snr", s)).transpose()?;
        if let Some(m) = &spec.mobility {
            coherence_time(m)?;
        }

        // S and r: given, calibrated, or from the finite-blocklength model.
        let (service_rate, channel_uses, service_rate_source) = match (spec.service_rate_s, calibration.service_rate_s)
        {
            (Some(_), Some(_)) => {
                return Err(Error::Conflict {
                    field: "service_rate_S",
                    detail: "set either service_rate_S or calibration.service_rate_S",
                })
            }
            (Some(s), None) => {
                let s = check_positive("service_rate_S", s)?;
                (s, payload_bits / s, Source::Given)
            }
            (None, Some(s)) => {
                let s = check_positive("calibration.service_rate_S", s)?;
                (s, payload_bits / s, Source::Calibrated)
            }
            (None, None) => {
                let snr = snr.ok_or(Error::Missing {
                    field: "service_rate_S",
                    hint: "give service_rate_S, calibration.service_rate_S, or snr to derive it",
                })?;
                let r = ChannelModel::new(snr, epsilon)?.required_blocklength(payload_bits)?;
                (payload_bits / r, r, Source::FiniteBlocklength)
            }
        };

        let (t_tx, t_tx_source) = match spec.t_tx {
            Some(t) => (check_non_negative("t_tx", t)?, Source::Given),
            None => (fbl::transmission_time(channel_uses, bandwidth)?, Source::Derived),
        };

        let d_feed = spec.d_feed.unwrap_or(SLOT_MS);
        let budget = DelayBudget::new(
            spec.d_gnb.unwrap_or(GNB_PROCESSING_SYMBOLS * OFDM_SYMBOL_MS),
            spec.d_ue.unwrap_or(UE_PROCESSING_SYMBOLS * OFDM_SYMBOL_MS),
            t_tx,
            d_feed,
            spec.d_timeout.unwrap_or(d_feed + SLOT_MS),
        )?;
        let single_attempt = budget.per_attempt();
        if !(d_max > single_attempt) {
            return Err(Error::Undeliverable { d_max, single_attempt });
        }

        Ok(Self {
            use_case: spec.use_case.clone(),
            p1,
            p2,
            p3,
            service_rate,
            d_max,
            budget,
            n_max,
            r_th,
            rho,
            bandwidth,
            payload_bits,
            snr,
            epsilon,
            mobility: spec.mobility,
            p2_source,
            service_rate_source,
            t_tx_source,
            spec,
        })
    }

    /// The fields as given, for re-serialization.
    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    /// p₁·p₂, the per-attempt decode success probability.
    pub fn success_probability(&self) -> f64 {
        self.p1 * self.p2
    }

    pub fn coherence_time(&self) -> Option<Result<f64>> {
        self.mobility.as_ref().map(coherence_time)
    }

    /// Copy with a different reliability target; used by sweeps over `r_th`.
    pub fn with_r_th(&self, r_th: f64) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.r_th = Some(r_th);
        Self::from_spec(spec)
    }

    pub fn with_d_max(&self, d_max: f64) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.d_max = d_max;
        Self::from_spec(spec)
    }
}
