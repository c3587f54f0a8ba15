//! The `[θ_min, θ_max]` operating region.
//!
//! Maximising EC subject to `R(θ) ≥ R_th` puts the optimum where the
//! reliability constraint is tight, so `θ_min` is the root of
//! `R(θ) = R_th` on the monotone reliability curve. EC only decreases in θ,
//! so the upper end `θ_max` is where EC has lost `ρ` from its supremum `𝓜`,
//! found by gradient descent on `Ψ(θ) = log|EC(θ) − (𝓜 − ρ)|` with a
//! central-difference gradient.

use serde::Serialize;

use crate::capacity::ec_retx;
use crate::error::{Error, Result};
use crate::numeric::{bisect_non_increasing, log_grid};
use crate::reliability::{reliability, saturation, unreliability};
use crate::scenario::Scenario;

pub const THETA_FLOOR: f64 = 1e-4;
pub const THETA_CEILING: f64 = 1e3;
/// Fraction of the saturated reliability the infeasible fallback aims for.
pub const INFEASIBLE_FRACTION: f64 = 1.0 - 1e-6;
pub const DEFAULT_RHO_FRACTION: f64 = 0.01;

const SUPREMUM_THETA: f64 = 1e-8;
const SUPREMUM_CHECK_THETA: f64 = 1e-7;
const SEED_POINTS: usize = 64;
const PERTURBATION: f64 = 1e-4;
const MAX_ITERATIONS: u32 = 10_000;
const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaMin {
    pub theta: f64,
    pub reliability: f64,
    pub feasible: bool,
    /// `sup_θ R(θ, n)`.
    pub achievable: f64,
}

/// Smallest θ meeting `r_th`, or, when `r_th` is out of reach, the smallest θ
/// within `1 − 1e-6` of the saturated reliability.
pub fn theta_min(s: &Scenario, n: u32) -> Result<ThetaMin> {
    let sat = saturation(s, n)?;
    let achievable = sat.value;
    let feasible = achievable >= s.r_th;
    // work on unreliability so nine-nines targets stay resolvable
    let target = if feasible {
        1.0 - s.r_th
    } else {
        sat.unreliability + (1.0 - INFEASIBLE_FRACTION) * achievable
    };
    let u = |theta: f64| unreliability(s, theta, n).unwrap_or(1.0);

    let theta = if u(THETA_FLOOR) <= target {
        THETA_FLOOR
    } else if u(THETA_CEILING) > target {
        THETA_CEILING
    } else {
        bisect_non_increasing(u, THETA_FLOOR, THETA_CEILING, target)
    };
    Ok(ThetaMin {
        theta,
        reliability: reliability(s, theta, n)?.value,
        feasible,
        achievable,
    })
}

fn ec_at(s: &Scenario, theta: f64, n: u32) -> Result<f64> {
    Ok(ec_retx(s.p1, s.p2, s.service_rate, theta, n)?.value)
}

/// `𝓜 = sup_θ EC(θ, n)`, reached as θ → 0⁺.
///
/// EC is evaluated at 1e-8 and 1e-7 and linearly extrapolated to zero.
pub fn ec_supremum(s: &Scenario, n: u32) -> Result<f64> {
    let near = ec_at(s, SUPREMUM_THETA, n)?;
    let far = ec_at(s, SUPREMUM_CHECK_THETA, n)?;
    let ratio = SUPREMUM_CHECK_THETA / SUPREMUM_THETA;
    Ok(near + (near - far) / (ratio - 1.0))
}

pub fn resolved_rho(s: &Scenario, supremum: f64) -> f64 {
    s.rho.unwrap_or(DEFAULT_RHO_FRACTION * supremum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaMax {
    pub theta: f64,
    pub ec: f64,
    /// EC never drops to `𝓜 − ρ` inside the search domain.
    pub saturated: bool,
    pub iterations: u32,
}

/// Gradient descent on the logarithmic distance to `𝓜 − ρ`.
///
/// Starts from the best point of a log-spaced seed grid. The step size
/// doubles after every accepted step and halves on rejection, so iterates
/// never move away from the target.
pub fn theta_max(s: &Scenario, n: u32) -> Result<ThetaMax> {
    let supremum = ec_supremum(s, n)?;
    let rho = resolved_rho(s, supremum);
    if rho >= supremum {
        return Err(Error::DegradationExceedsCapacity { rho, supremum });
    }
    let target = supremum - rho;
    let gap = |theta: f64| ec_at(s, theta, n).map(|ec| ec - target);
    let psi = |theta: f64| gap(theta).map(|g| libm::log(libm::fabs(g)));
    let tolerance = TOLERANCE * supremum;

    let ceiling_gap = gap(THETA_CEILING)?;
    if ceiling_gap > 0.0 {
        return Ok(ThetaMax {
            theta: THETA_CEILING,
            ec: ceiling_gap + target,
            saturated: true,
            iterations: 0,
        });
    }
    let floor_gap = gap(THETA_FLOOR)?;
    if floor_gap <= 0.0 {
        return Ok(ThetaMax {
            theta: THETA_FLOOR,
            ec: floor_gap + target,
            saturated: false,
            iterations: 0,
        });
    }

    let mut theta = THETA_FLOOR;
    let mut best = f64::INFINITY;
    for candidate in log_grid(THETA_FLOOR, THETA_CEILING, SEED_POINTS) {
        let value = psi(candidate)?;
        if value < best {
            best = value;
            theta = candidate;
        }
    }

    let mut current = psi(theta)?;
    let mut step: Option<f64> = None;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && libm::fabs(gap(theta)?) > tolerance {
        iterations += 1;
        let delta = PERTURBATION * theta;
        let grad = (psi(theta + delta)? - psi(theta - delta)?) / (2.0 * delta);
        if !grad.is_finite() || grad == 0.0 {
            break;
        }
        // first step moves θ by 10%
        let mut eta = step.unwrap_or(0.1 * theta / libm::fabs(grad));
        let mut accepted = false;
        for _ in 0..200 {
            let next = theta - eta * grad;
            if next > THETA_FLOOR && next < THETA_CEILING {
                let value = psi(next)?;
                if value < current {
                    theta = next;
                    current = value;
                    accepted = true;
                    break;
                }
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
        step = Some(2.0 * eta);
    }

    Ok(ThetaMax {
        theta,
        ec: ec_at(s, theta, n)?,
        saturated: false,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingRegion {
    pub n: u32,
    pub theta_min: f64,
    pub theta_max: f64,
    pub reliability_at_min: f64,
    pub reliability_at_max: f64,
    pub ec_at_min: f64,
    pub ec_at_max: f64,
    pub supremum_m: f64,
    pub rho: f64,
    pub r_th: f64,
    pub feasible: bool,
    pub achievable_reliability: f64,
    /// `θ_min > θ_max`: no θ satisfies both ends.
    pub empty: bool,
    pub theta_max_saturated: bool,
}

pub fn solve_region(s: &Scenario, n: u32) -> Result<OperatingRegion> {
    let lower = theta_min(s, n)?;
    let upper = theta_max(s, n)?;
    let supremum = ec_supremum(s, n)?;
    Ok(OperatingRegion {
        n,
        theta_min: lower.theta,
        theta_max: upper.theta,
        reliability_at_min: lower.reliability,
        reliability_at_max: reliability(s, upper.theta, n)?.value,
        ec_at_min: ec_at(s, lower.theta, n)?,
        ec_at_max: upper.ec,
        supremum_m: supremum,
        rho: resolved_rho(s, supremum),
        r_th: s.r_th,
        feasible: lower.feasible,
        achievable_reliability: lower.achievable,
        empty: lower.theta > upper.theta,
        theta_max_saturated: upper.saturated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{mean_service_rate, MgfForm};
    use crate::scenario::ScenarioSpec;

    fn spec(p2: f64, d_max: f64, r_th: f64, n_max: u32) -> ScenarioSpec {
        ScenarioSpec {
            p1: 1.0,
            p2: Some(p2),
            p3: 1.0,
            d_max,
            n_max: Some(n_max),
            r_th: Some(r_th),
            service_rate_s: Some(3.0),
            ..Default::default()
        }
    }

    #[test]
    fn vacuous_target_gives_floor() {
        let s = Scenario::from_spec(spec(0.99, 2.0, 0.0, 1)).unwrap();
        let t = theta_min(&s, 1).unwrap();
        assert_eq!(t.theta, THETA_FLOOR);
        assert!(t.feasible);
    }

    #[test]
    fn single_path_closed_form() {
        let s = Scenario::from_spec(spec(1.0, 4.0, 0.99999, 1)).unwrap();
        let slack = s.d_max - s.budget.per_attempt();
        let expected = -(1.0f64 - 0.99999).ln() / slack;
        let t = theta_min(&s, 1).unwrap();
        assert!(
            (t.theta - expected).abs() < 1e-9 * expected,
            "{} vs {}",
            t.theta,
            expected
        );
        assert!((t.reliability - 0.99999).abs() <= 1e-12);
    }

    #[test]
    fn infeasible_target_falls_back() {
        let s = Scenario::from_spec(spec(0.999, 1.0, 0.99999, 1)).unwrap();
        let t = theta_min(&s, 1).unwrap();
        assert!(!t.feasible);
        assert!((t.achievable - 0.999).abs() < 1e-15);
        assert!(t.reliability >= INFEASIBLE_FRACTION * t.achievable * (1.0 - 1e-12));
    }

    #[test]
    fn supremum_matches_mean_service() {
        for (p2, n) in [(0.9, 1), (0.9994, 2), (0.7, 3), (1.0, 4)] {
            let s = Scenario::from_spec(spec(p2, 20.0, 0.0, n)).unwrap();
            let m = ec_supremum(&s, n).unwrap();
            let mean = mean_service_rate(p2, 3.0, n, MgfForm::Published);
            assert!((m - mean).abs() < 1e-9 * mean, "{m} vs {mean}");
        }
    }

    #[test]
    fn constant_ec_saturates() {
        let mut sp = spec(1.0, 5.0, 0.0, 1);
        sp.rho = Some(0.5);
        let s = Scenario::from_spec(sp).unwrap();
        let t = theta_max(&s, 1).unwrap();
        assert!(t.saturated);
        assert_eq!(t.theta, THETA_CEILING);
    }

    #[test]
    fn rho_at_supremum_is_rejected() {
        let mut sp = spec(0.9, 5.0, 0.0, 1);
        sp.rho = Some(2.8);
        let s = Scenario::from_spec(sp).unwrap();
        assert!(matches!(
            theta_max(&s, 1),
            Err(Error::DegradationExceedsCapacity { .. })
        ));
    }

    #[test]
    fn theta_max_hits_target() {
        let mut sp = spec(0.9994, 5.0, 0.0, 2);
        sp.rho = Some(0.07);
        let s = Scenario::from_spec(sp).unwrap();
        for n in 1..=2 {
            let m = ec_supremum(&s, n).unwrap();
            let t = theta_max(&s, n).unwrap();
            assert!((t.ec - (m - 0.07)).abs() <= 1e-6 * m, "n={n} {t:?}");
        }
    }

    #[test]
    fn tiny_rho_goes_to_floor() {
        let mut sp = spec(0.9, 5.0, 0.0, 1);
        sp.rho = Some(1e-9);
        let s = Scenario::from_spec(sp).unwrap();
        let t = theta_max(&s, 1).unwrap();
        assert!(t.theta < 1e-3, "{t:?}");
    }

    #[test]
    fn unconstrained_region() {
        let mut sp = spec(0.99, 5.0, 0.0, 1);
        sp.rho = Some(0.5 * 0.99 * 3.0);
        let s = Scenario::from_spec(sp).unwrap();
        let r = solve_region(&s, 1).unwrap();
        assert!(r.feasible && !r.empty);
        assert_eq!(r.theta_min, THETA_FLOOR);
        assert!(r.ec_at_min >= r.ec_at_max);
    }
}
