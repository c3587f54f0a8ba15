use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;
use urllc_ec_core::capacity::ec_retx;
use urllc_ec_core::reliability::{dvp, reliability};
use urllc_ec_core::{log_grid, Scenario};

pub const CSV_HEADER: &str = "theta,n,ec_bpcu,reliability,unreliability,dvp_first_attempt";

#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("grid {0:?} is not MIN:MAX:POINTS")]
    Syntax(String),
    #[error("grid needs 0 < MIN < MAX and POINTS >= 2 (got {min}:{max}:{points})")]
    Range { min: f64, max: f64, points: usize },
    #[error("theta grid is not strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("n={n} outside [1, n_max={n_max}]")]
    Attempts { n: u32, n_max: u32 },
    #[error(transparent)]
    Model(#[from] urllc_ec_core::Error),
}

/// Log-spaced θ grid written `MIN:MAX:POINTS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridArg {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl FromStr for GridArg {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || SweepError::Syntax(s.to_string());
        let mut parts = s.split(':');
        let (Some(a), Some(b), Some(c), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(syntax());
        };
        let min: f64 = a.trim().parse().map_err(|_| syntax())?;
        let max: f64 = b.trim().parse().map_err(|_| syntax())?;
        let points: usize = c.trim().parse().map_err(|_| syntax())?;
        if !(min > 0.0 && max > min && max.is_finite()) || points < 2 {
            return Err(SweepError::Range { min, max, points });
        }
        Ok(Self { min, max, points })
    }
}

impl GridArg {
    pub fn values(&self) -> Vec<f64> {
        log_grid(self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub theta_grid: Vec<f64>,
    pub n_list: Vec<u32>,
}

impl SweepSpec {
    /// An empty `n_list` means every attempt count up to `n_max`.
    pub fn new(theta_grid: Vec<f64>, n_list: Vec<u32>, s: &Scenario) -> Result<Self, SweepError> {
        if let Some(i) = theta_grid.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(SweepError::NotIncreasing(i + 1));
        }
        let n_list = if n_list.is_empty() {
            (1..=s.n_max).collect()
        } else {
            n_list
        };
        if let Some(&n) = n_list.iter().find(|&&n| n == 0 || n > s.n_max) {
            return Err(SweepError::Attempts { n, n_max: s.n_max });
        }
        Ok(Self { theta_grid, n_list })
    }

    fn points(&self) -> Vec<(f64, u32)> {
        self.theta_grid
            .iter()
            .flat_map(|&theta| self.n_list.iter().map(move |&n| (theta, n)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub n: u32,
    pub ec_bpcu: f64,
    pub reliability: f64,
    pub unreliability: f64,
    pub dvp_first_attempt: f64,
}

pub fn evaluate(s: &Scenario, theta: f64, n: u32) -> Result<SweepRow, SweepError> {
    let r = reliability(s, theta, n)?;
    let ec = ec_retx(s.p1, s.p2, s.service_rate, theta, n)?;
    Ok(SweepRow {
        theta,
        n,
        ec_bpcu: ec.value,
        reliability: r.value,
        unreliability: r.unreliability,
        dvp_first_attempt: dvp(theta, s.d_max - s.budget.per_attempt())?,
    })
}

/// Rows θ-major, then in `n_list` order. Evaluated on `pool`, returned in
/// grid order.
pub fn run(s: &Scenario, spec: &SweepSpec, pool: &rayon::ThreadPool) -> Result<Vec<SweepRow>, SweepError> {
    let points = spec.points();
    pool.install(|| points.par_iter().map(|&(theta, n)| evaluate(s, theta, n)).collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            crate::sci(r.theta),
            r.n,
            crate::sci(r.ec_bpcu),
            crate::sci(r.reliability),
            crate::sci(r.unreliability),
            crate::sci(r.dvp_first_attempt),
        )?;
    }
    out.flush()
}
