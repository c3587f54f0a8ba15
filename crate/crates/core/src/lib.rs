//! Reliability and effective-capacity analysis for URLLC links running RLC
//! acknowledged mode with separate transmission (TX) and retransmission
//! (RETX) buffers.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational:
//!
//! - [`fbl`]: finite-blocklength channel math (capacity, dispersion, Q⁻¹,
//!   achievable rate, required channel uses).
//! - [`delay`]: deterministic delay budgets for multi-attempt timelines.
//! - [`reliability`]: per-attempt event probabilities, delay violation
//!   probability and the N-attempt reliability sum.
//! - [`capacity`]: effective capacity of the TX and RETX buffers and the
//!   queue stability predicate.
//! - [`region`]: the `[θ_min, θ_max]` operating region solver.
//! - [`oracle`]: exhaustive enumeration and seeded Monte-Carlo estimators
//!   used to cross-check the closed forms.
//!
//! Delays are in milliseconds everywhere, so the delay exponent θ is per
//! millisecond. File IO and the command line live in the `urllc-ec` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod capacity;
pub mod delay;
mod error;
pub mod fbl;
mod numeric;
pub mod oracle;
pub mod region;
pub mod reliability;
pub mod scenario;

pub use error::{Error, Result};
pub use numeric::{log_grid, CompensatedSum};
pub use scenario::{Calibration, MobilityParams, Scenario, ScenarioSpec};
