use serde::Serialize;
use urllc_ec_core::fbl::{self, ChannelModel};
use urllc_ec_core::region::{solve_region, OperatingRegion};
use urllc_ec_core::{Result, Scenario};

/// Aligned plain-text table. The first column is left-aligned, the rest
/// right-aligned.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut out = String::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let pad = w - cell.chars().count();
            if i == 0 {
                out.push_str(cell);
                out.extend(std::iter::repeat_n(' ', pad));
            } else {
                out.extend(std::iter::repeat_n(' ', pad));
                out.push_str(cell);
            }
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    };
    let mut out = line(&mut headers.iter().copied());
    let rule: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

fn key_values(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub use_case: Option<String>,
    pub d_max: f64,
    #[serde(flatten)]
    pub region: OperatingRegion,
}

impl RegionReport {
    pub fn solve(s: &Scenario, n: u32) -> Result<Self> {
        Ok(Self {
            use_case: s.use_case.clone(),
            d_max: s.d_max,
            region: solve_region(s, n)?,
        })
    }

    pub fn to_table(&self) -> String {
        let r = &self.region;
        key_values(&[
            ("use_case", self.use_case.clone().unwrap_or_else(|| "-".into())),
            ("d_max_ms", format!("{}", self.d_max)),
            ("n", r.n.to_string()),
            ("r_th", format!("{}", r.r_th)),
            ("feasible", r.feasible.to_string()),
            ("achievable_reliability", format!("{:.10}", r.achievable_reliability)),
            ("theta_min", format!("{:.6}", r.theta_min)),
            ("theta_max", format!("{:.6}", r.theta_max)),
            ("empty", r.empty.to_string()),
            ("theta_max_saturated", r.theta_max_saturated.to_string()),
            ("reliability_at_min", format!("{:.10}", r.reliability_at_min)),
            ("reliability_at_max", format!("{:.10}", r.reliability_at_max)),
            ("ec_at_min_bpcu", format!("{:.6}", r.ec_at_min)),
            ("ec_at_max_bpcu", format!("{:.6}", r.ec_at_max)),
            ("supremum_bpcu", format!("{:.6}", r.supremum_m)),
            ("rho", format!("{:.6}", r.rho)),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FblReport {
    pub snr: f64,
    #[serde(rename = "payload_L")]
    pub payload_l: f64,
    pub epsilon: f64,
    #[serde(rename = "bandwidth_B")]
    pub bandwidth_b: f64,
    pub capacity_c: f64,
    pub dispersion_v: f64,
    pub channel_uses_r: f64,
    pub rounded_up: bool,
    #[serde(rename = "service_rate_S")]
    pub service_rate_s: f64,
    pub t_tx_ms: f64,
}

impl FblReport {
    /// With `ceil`, `r` is rounded up to whole channel uses before `S` and
    /// `T` are computed.
    pub fn new(snr: f64, payload_l: f64, epsilon: f64, bandwidth_b: f64, ceil: bool) -> Result<Self> {
        let ch = ChannelModel::new(snr, epsilon)?;
        let mut r = ch.required_blocklength(payload_l)?;
        if ceil {
            r = r.ceil();
        }
        Ok(Self {
            snr,
            payload_l,
            epsilon,
            bandwidth_b,
            capacity_c: ch.capacity,
            dispersion_v: ch.dispersion,
            channel_uses_r: r,
            rounded_up: ceil,
            service_rate_s: payload_l / r,
            t_tx_ms: fbl::transmission_time(r, bandwidth_b)?,
        })
    }

    pub fn to_table(&self) -> String {
        key_values(&[
            ("snr", format!("{}", self.snr)),
            ("payload_L_bits", format!("{}", self.payload_l)),
            ("epsilon", format!("{:e}", self.epsilon)),
            ("bandwidth_B_hz", format!("{}", self.bandwidth_b)),
            ("C_bpcu", format!("{:.6}", self.capacity_c)),
            ("V", format!("{:.6}", self.dispersion_v)),
            ("r_channel_uses", format!("{:.4}", self.channel_uses_r)),
            ("S_bpcu", format!("{:.6}", self.service_rate_s)),
            ("T_ms", format!("{:.6}", self.t_tx_ms)),
        ])
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report is serializable");
    s.push('\n');
    s
}
