use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use urllc_ec::report::{to_json, FblReport, RegionReport};
use urllc_ec::sweep::{self, GridArg, SweepSpec};
use urllc_ec::{load_scenario, simulate, table, thread_pool};

const EXIT_INPUT: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

/// Reliability, effective capacity and delay-exponent operating regions for
/// RLC-AM URLLC links.
#[derive(Parser)]
#[command(name = "urllc-ec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the [θ_min, θ_max] operating region. Exits 2 when r_th is out of reach.
    Region {
        #[arg(long)]
        scenario: PathBuf,
        /// Attempt count; defaults to the scenario's n_max.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Evaluate EC and reliability on a log-spaced θ grid as CSV.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// MIN:MAX:POINTS, log-spaced, θ per ms.
        #[arg(long)]
        grid: GridArg,
        /// Attempt counts (repeat or comma-separate); defaults to 1..=n_max.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Solve every use-case scenario in a directory.
    Table {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-blocklength channel uses, service rate and transmission time.
    Fbl {
        /// Linear SNR.
        #[arg(long)]
        snr: f64,
        /// Payload L in bits.
        #[arg(long, default_value_t = 256.0)]
        payload: f64,
        #[arg(long, default_value_t = 1e-5)]
        epsilon: f64,
        /// Bandwidth B in Hz.
        #[arg(long, default_value_t = 20e6)]
        bandwidth: f64,
        /// Round r up to whole channel uses.
        #[arg(long)]
        ceil: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Monte-Carlo reliability against the closed form.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

type Outcome = Result<u8, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Region { scenario, n, format } => region(scenario, n, format),
        Command::Sweep {
            scenario,
            grid,
            n,
            out,
            format,
        } => sweep_cmd(scenario, grid, n, out, format),
        Command::Table { dir, format, out } => table_cmd(dir, format, out),
        Command::Fbl {
            snr,
            payload,
            epsilon,
            bandwidth,
            ceil,
            format,
        } => fbl(snr, payload, epsilon, bandwidth, ceil, format),
        Command::Simulate {
            scenario,
            theta,
            n,
            trials,
            seed,
            format,
        } => simulate_cmd(scenario, theta, n, trials, seed, format),
    }
}

fn unsupported(command: &str, format: Format) -> String {
    let name = format
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    format!("{command} does not support --format {name}")
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| e.to_string())
        }
    }
}

fn region(path: PathBuf, n: Option<u32>, format: Format) -> Outcome {
    let s = load_scenario(&path).map_err(|e| e.to_string())?;
    let report = RegionReport::solve(&s, n.unwrap_or(s.n_max)).map_err(|e| e.to_string())?;
    let text = match format {
        Format::Json => to_json(&report),
        Format::Table => report.to_table(),
        Format::Csv => return Err(unsupported("region", format)),
    };
    emit(None, &text)?;
    Ok(if report.region.feasible { 0 } else { EXIT_INFEASIBLE })
}

fn sweep_cmd(path: PathBuf, grid: GridArg, n: Vec<u32>, out: Option<PathBuf>, format: Format) -> Outcome {
    if format != Format::Csv {
        return Err(unsupported("sweep", format));
    }
    let s = load_scenario(&path).map_err(|e| e.to_string())?;
    let spec = SweepSpec::new(grid.values(), n, &s).map_err(|e| e.to_string())?;
    let pool = thread_pool().map_err(|e| e.to_string())?;
    let rows = sweep::run(&s, &spec, &pool).map_err(|e| e.to_string())?;
    let written = match &out {
        Some(p) => File::create(p).and_then(|f| sweep::write_csv(&rows, BufWriter::new(f))),
        None => sweep::write_csv(&rows, io::stdout().lock()),
    };
    written.map_err(|e| match &out {
        Some(p) => format!("{}: {e}", p.display()),
        None => e.to_string(),
    })?;
    Ok(0)
}

fn table_cmd(dir: PathBuf, format: Format, out: Option<PathBuf>) -> Outcome {
    let t = table::build(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let text = match format {
        Format::Table => t.to_text(),
        Format::Csv => t.to_csv(),
        Format::Json => to_json(&t.rows),
    };
    emit(out.as_ref(), &text)?;
    for f in &t.failures {
        eprintln!("error: {}", f.error);
    }
    Ok(if t.failures.is_empty() { 0 } else { EXIT_INPUT })
}

fn fbl(snr: f64, payload: f64, epsilon: f64, bandwidth: f64, ceil: bool, format: Format) -> Outcome {
    let report = FblReport::new(snr, payload, epsilon, bandwidth, ceil).map_err(|e| e.to_string())?;
    let text = match format {
        Format::Json => to_json(&report),
        Format::Table => report.to_table(),
        Format::Csv => return Err(unsupported("fbl", format)),
    };
    emit(None, &text)?;
    Ok(0)
}

fn simulate_cmd(path: PathBuf, theta: f64, n: Option<u32>, trials: u64, seed: u64, format: Format) -> Outcome {
    if format != Format::Json {
        return Err(unsupported("simulate", format));
    }
    let s = load_scenario(&path).map_err(|e| e.to_string())?;
    let pool = thread_pool().map_err(|e| e.to_string())?;
    let report = simulate::simulate(&s, theta, n.unwrap_or(s.n_max), trials, seed, &pool).map_err(|e| e.to_string())?;
    emit(None, &to_json(&report))?;
    Ok(0)
}
