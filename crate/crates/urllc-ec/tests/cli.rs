use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_urllc-ec"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn tradeoff() -> String {
    scenarios().join("tradeoff.json").display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn region_perfect_channel_is_feasible() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "perfect.json",
        r#"{"p1": 1, "p2": 1, "p3": 1, "d_max": 2, "service_rate_S": 3, "r_th": 0.99999}"#,
    );
    let o = run(&["region", "--scenario", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["feasible"], true);
    assert_eq!(v["achievable_reliability"], 1.0);
}

#[test]
fn region_telepresence_warns_infeasible() {
    let f = scenarios().join("use_cases/01_telepresence.json");
    let o = run(&["region", "--scenario", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["feasible"], false);
    let achievable = v["achievable_reliability"].as_f64().unwrap();
    assert!((achievable - 0.9994).abs() < 1e-9, "{achievable}");
    assert_eq!(v["use_case"], "Telepresence");

    let o = run(&["region", "--scenario", f.to_str().unwrap(), "--format", "table"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("feasible                false"));
}

#[test]
fn region_input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    let o = run(&["region", "--scenario", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.json"));

    let invalid = write(
        dir.path(),
        "p1.json",
        r#"{"p1": 1.2, "p2": 1, "p3": 1, "d_max": 1, "service_rate_S": 3}"#,
    );
    let o = run(&["region", "--scenario", &invalid]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("p1 out of [0,1]"), "{}", stderr(&o));

    let o = run(&["region", "--scenario", &tradeoff(), "--n", "9"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["region", "--scenario", &tradeoff(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(run(&["region", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("sweep"));
}

#[test]
fn sweep_matches_golden_file() {
    let o = run(&["sweep", "--scenario", &tradeoff(), "--grid", "0.1:10:3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let golden =
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/tradeoff_sweep.csv")).unwrap();
    assert_eq!(stdout(&o), golden);
}

fn parse_csv(text: &str) -> Vec<(f64, u32, f64, f64)> {
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("theta,n,ec_bpcu,reliability,unreliability,dvp_first_attempt")
    );
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 6);
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn sweep_file_properties() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep",
        "--scenario",
        &tradeoff(),
        "--grid",
        "0.1:10:41",
        "--n",
        "1,2,3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let rows = parse_csv(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 41 * 3);
    for n in 1..=3 {
        let series: Vec<_> = rows.iter().filter(|r| r.1 == n).collect();
        assert!(series.windows(2).all(|w| w[1].0 > w[0].0));
        assert!(series.windows(2).all(|w| w[1].2 <= w[0].2), "EC not monotone for n={n}");
    }
    let first = rows.iter().find(|r| r.1 == 1).unwrap();
    assert!((first.2 - 3.0).abs() < 0.06);
    let saturated = rows.iter().rfind(|r| r.1 == 2).unwrap();
    assert!((saturated.3 - 0.999999).abs() < 1e-6);
}

#[test]
fn sweep_is_thread_count_independent() {
    let go = |threads: &str| {
        let o = bin()
            .env("URLLC_EC_THREADS", threads)
            .args(["sweep", "--scenario", &tradeoff(), "--grid", "0.001:100:57"])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let one = go("1");
    assert_eq!(one, go("4"));
    assert_eq!(one, go("3"));

    let o = bin()
        .env("URLLC_EC_THREADS", "zero")
        .args(["sweep", "--scenario", &tradeoff(), "--grid", "1:2:2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("URLLC_EC_THREADS"));
}

#[test]
fn sweep_rejects_bad_input() {
    assert_eq!(
        run(&["sweep", "--scenario", &tradeoff(), "--grid", "10:1:5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["sweep", "--scenario", &tradeoff(), "--grid", "1:10"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["sweep", "--scenario", &tradeoff(), "--grid", "1:10:5", "--n", "4"])
            .status
            .code(),
        Some(1)
    );
    let o = run(&[
        "sweep",
        "--scenario",
        &tradeoff(),
        "--grid",
        "1:10:5",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/dir/x.csv"));
}

#[test]
fn table_over_shipped_use_cases() {
    let dir = scenarios().join("use_cases");
    let o = run(&["table", "--dir", dir.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let names: Vec<&str> = rows.iter().map(|r| r["use_case"].as_str().unwrap()).collect();
    assert_eq!(names[0], "Telepresence");
    assert_eq!(names[5], "Flight control systems");
    let nav = &rows[4];
    assert_eq!(nav["n"], 3);
    assert_eq!(nav["d_max"], 10.0);
    assert_eq!(nav["r_th"], 0.9999999);
    let ec = nav["ec_bpcu"].as_f64().unwrap();
    assert!((ec - 1.01).abs() < 0.1, "{ec}");

    let csv = run(&["table", "--dir", dir.to_str().unwrap(), "--format", "csv"]);
    let text = stdout(&csv);
    assert!(text.starts_with("use_case,d_max,r_th,n,theta_min,theta_max,achievable_reliability,ec_bpcu\n"));
    assert_eq!(text.lines().count(), 7);

    let table = run(&["table", "--dir", dir.to_str().unwrap()]);
    assert!(stdout(&table).lines().next().unwrap().starts_with("use_case"));
}

#[test]
fn table_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["table", "--dir", dir.path().to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn table_reports_bad_files_and_keeps_rows() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(tradeoff(), dir.path().join("a.json")).unwrap();
    write(dir.path(), "b.json", r#"{"p1": 2}"#);
    write(dir.path(), "notes.txt", "ignored");
    let o = run(&["table", "--dir", dir.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o).as_array().unwrap().len(), 1);
    assert!(stderr(&o).contains("b.json"));
}

#[test]
fn fbl_report() {
    let o = run(&["fbl", "--snr", "15", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["capacity_c"], 4.0);
    let r = v["channel_uses_r"].as_f64().unwrap();
    let s = v["service_rate_S"].as_f64().unwrap();
    assert!((r * s - 256.0).abs() < 1e-9);
    assert!(r.fract() != 0.0);

    let o = run(&["fbl", "--snr", "15", "--ceil", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["channel_uses_r"].as_f64().unwrap(), r.ceil());

    let o = run(&["fbl", "--snr", "15"]);
    assert!(stdout(&o).contains("C_bpcu"));

    assert_eq!(run(&["fbl", "--snr", "15", "--epsilon", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["fbl", "--snr", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["fbl", "--snr", "0"]).status.code(), Some(1));
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate",
        "--scenario",
        &tradeoff(),
        "--theta",
        "1",
        "--n",
        "2",
        "--trials",
        "200000",
        "--seed",
        "42",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let b = bin().env("URLLC_EC_THREADS", "1").args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    for key in [
        "estimate",
        "standard_error",
        "trials",
        "seed",
        "analytic_value",
        "z_score",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["z_score"].as_f64().unwrap().abs() <= 4.0);
}

#[test]
fn simulate_single_trial_has_null_error() {
    let o = run(&["simulate", "--scenario", &tradeoff(), "--theta", "1", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["standard_error"].is_null());
    assert!(v["z_score"].is_null());
    assert_eq!(v["trials"], 1);

    assert_eq!(
        run(&["simulate", "--scenario", &tradeoff(), "--theta", "1", "--trials", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["simulate", "--scenario", &tradeoff(), "--theta", "-1"])
            .status
            .code(),
        Some(1)
    );
}
