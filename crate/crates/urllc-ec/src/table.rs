use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use urllc_ec_core::region::solve_region;

use crate::report::render_table;
use crate::{load_scenario, sci, LoadError};

pub const HEADERS: [&str; 8] = [
    "use_case",
    "d_max",
    "r_th",
    "n",
    "theta_min",
    "theta_max",
    "achievable_reliability",
    "ec_bpcu",
];

/// One use case, solved at its own `n_max`. `ec_bpcu` is EC at `θ_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UseCaseRow {
    pub use_case: String,
    pub d_max: f64,
    pub r_th: f64,
    pub n: u32,
    pub theta_min: f64,
    pub theta_max: f64,
    pub achievable_reliability: f64,
    pub ec_bpcu: f64,
    pub feasible: bool,
}

#[derive(Debug)]
pub struct TableFailure {
    pub path: PathBuf,
    pub error: LoadError,
}

#[derive(Debug, Default)]
pub struct UseCaseTable {
    pub rows: Vec<UseCaseRow>,
    pub failures: Vec<TableFailure>,
}

/// Every `*.json` file in `dir`, in file-name order.
pub fn scenario_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn build(dir: &Path) -> io::Result<UseCaseTable> {
    let mut table = UseCaseTable::default();
    for path in scenario_files(dir)? {
        match row_for(&path) {
            Ok(row) => table.rows.push(row),
            Err(error) => table.failures.push(TableFailure { path, error }),
        }
    }
    Ok(table)
}

fn row_for(path: &Path) -> Result<UseCaseRow, LoadError> {
    let s = load_scenario(path)?;
    let region = solve_region(&s, s.n_max).map_err(|source| LoadError::Invalid {
        path: path.to_path_buf(),
        source,
    })?;
    let use_case = s.use_case.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|x| x.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    Ok(UseCaseRow {
        use_case,
        d_max: s.d_max,
        r_th: s.r_th,
        n: region.n,
        theta_min: region.theta_min,
        theta_max: region.theta_max,
        achievable_reliability: region.achievable_reliability,
        ec_bpcu: region.ec_at_max,
        feasible: region.feasible,
    })
}

impl UseCaseTable {
    pub fn to_text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.use_case.clone(),
                    format!("{}", r.d_max),
                    format!("{:.9}%", r.r_th * 100.0),
                    r.n.to_string(),
                    format!("{:.3}", r.theta_min),
                    format!("{:.3}", r.theta_max),
                    format!("{:.9}%", r.achievable_reliability * 100.0),
                    format!("{:.3}", r.ec_bpcu),
                ]
            })
            .collect();
        render_table(&HEADERS, &rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = HEADERS.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                csv_text(&r.use_case),
                sci(r.d_max),
                sci(r.r_th),
                r.n,
                sci(r.theta_min),
                sci(r.theta_max),
                sci(r.achievable_reliability),
                sci(r.ec_bpcu),
            ));
        }
        out
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
