use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} out of {range} (got {value})")]
    OutOfRange {
        field: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("{field} is missing: {hint}")]
    Missing { field: &'static str, hint: &'static str },

    #[error("{field} is given twice: {detail}")]
    Conflict { field: &'static str, detail: &'static str },

    #[error(
        "d_max ({d_max} ms) does not exceed d_gnb + d_ue + t_tx ({single_attempt} ms); no attempt can be delivered"
    )]
    Undeliverable { d_max: f64, single_attempt: f64 },

    #[error("attempt count {n} outside [1, {n_max}]")]
    Attempts { n: u32, n_max: u32 },

    #[error("{n} attempts allow at most {} feedback/timeout events, got a1={a1} a2={a2}", n.saturating_sub(1))]
    EventCount { n: u32, a1: u32, a2: u32 },

    #[error("capacity is zero at snr=0; payload cannot be delivered")]
    ZeroCapacity,

    #[error("rho ({rho}) is not below the effective-capacity supremum ({supremum})")]
    DegradationExceedsCapacity { rho: f64, supremum: f64 },
}

/// Checks `lo <= value <= hi` (NaN fails).
pub(crate) fn check_closed(field: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<f64> {
    if value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::OutOfRange { field, range, value })
    }
}

pub(crate) fn check_probability(field: &'static str, value: f64) -> Result<f64> {
    check_closed(field, value, 0.0, 1.0, "[0,1]")
}

pub(crate) fn check_positive(field: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            field,
            range: "(0,inf)",
            value,
        })
    }
}

pub(crate) fn check_non_negative(field: &'static str, value: f64) -> Result<f64> {
    check_closed(field, value, 0.0, f64::MAX, "[0,inf)")
}
