//! Shared pieces of the acceptance suite: shipped-scenario access, seeded
//! random scenario generators, and oracles that are independent of the
//! solvers they check.

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use urllc_ec_core::capacity::ec_retx;
use urllc_ec_core::region::{ec_supremum, resolved_rho, THETA_CEILING, THETA_FLOOR};
use urllc_ec_core::{Calibration, Scenario, ScenarioSpec};

pub fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../urllc-ec/scenarios")
}

pub fn shipped(name: &str) -> Scenario {
    let path = scenarios_dir().join(name);
    urllc_ec::load_scenario(&path).unwrap_or_else(|e| panic!("{e}"))
}

/// The six use cases in file-name order.
pub fn use_cases() -> Vec<Scenario> {
    let files = urllc_ec::table::scenario_files(&scenarios_dir().join("use_cases")).expect("use_cases directory");
    files
        .iter()
        .map(|p| urllc_ec::load_scenario(p).unwrap_or_else(|e| panic!("{e}")))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `10^u` with `u` uniform in `[lo, hi)`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo.log10()..hi.log10()))
}

/// Unrestricted channel and delay parameters, `n_max` attempts.
pub fn random_scenario(rng: &mut ChaCha8Rng, n_max: u32) -> Scenario {
    let d_gnb = rng.random_range(0.0..0.5);
    let d_ue = rng.random_range(0.0..0.5);
    let t_tx = rng.random_range(0.0..0.5);
    let d_max = d_gnb + d_ue + t_tx + rng.random_range(0.05..8.0);
    let spec = ScenarioSpec {
        p1: rng.random_range(0.0..=1.0),
        p2: Some(rng.random_range(0.0..=1.0)),
        p3: rng.random_range(0.0..=1.0),
        service_rate_s: Some(rng.random_range(0.5..6.0)),
        d_max,
        d_gnb: Some(d_gnb),
        d_ue: Some(d_ue),
        d_feed: Some(rng.random_range(0.0..1.5)),
        d_timeout: Some(rng.random_range(0.0..2.0)),
        t_tx: Some(t_tx),
        n_max: Some(n_max),
        ..Default::default()
    };
    Scenario::from_spec(spec).expect("generated scenario is valid")
}

/// A scenario in the calibrated family: a success product near one, a
/// service rate of a few bpcu, numerology-1 processing, and a degradation
/// `rho` that is a random fraction of the supremum.
pub fn random_calibrated(rng: &mut ChaCha8Rng) -> Scenario {
    let n_max = rng.random_range(1..=3);
    let product = 1.0 - log_uniform(rng, 1e-5, 1e-2);
    let p1 = rng.random_range(product.max(0.999)..=1.0);
    let spec = ScenarioSpec {
        p1,
        p3: rng.random_range(0.999..=1.0),
        d_max: [1.0, 5.0, 10.0][rng.random_range(0..3)],
        d_feed: Some(0.5),
        d_timeout: Some(1.0),
        n_max: Some(n_max),
        calibration: Some(Calibration {
            service_rate_s: Some(rng.random_range(1.0..5.0)),
            success_product: Some(product),
            note: None,
        }),
        ..Default::default()
    };
    let s = Scenario::from_spec(spec).expect("generated scenario is valid");
    let supremum = ec_supremum(&s, n_max).expect("supremum");
    let mut spec = s.spec().clone();
    spec.rho = Some(log_uniform(rng, 0.005, 0.3) * supremum);
    Scenario::from_spec(spec).expect("generated scenario is valid")
}

/// `θ` where `EC(θ, n) = 𝓜 − ρ`, by plain bisection on the EC curve.
/// `None` when the crossing lies outside the solver's search domain.
pub fn theta_max_bisection(s: &Scenario, n: u32) -> Option<f64> {
    let supremum = ec_supremum(s, n).ok()?;
    let target = supremum - resolved_rho(s, supremum);
    let ec = |theta: f64| ec_retx(s.p1, s.p2, s.service_rate, theta, n).expect("ec").value;
    let (mut lo, mut hi) = (THETA_FLOOR, THETA_CEILING);
    if ec(lo) <= target || ec(hi) > target {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if ec(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-13 {
            break;
        }
    }
    Some((lo * hi).sqrt())
}

/// Relative deviation of `value` from `reference`.
pub fn rel(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

/// Prints one verdict line and returns `pass` for the caller to assert.
pub fn verdict(id: u32, title: &str, pass: bool, detail: &str) -> bool {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {id:>2} {status}  {title}: {detail}");
    pass
}
