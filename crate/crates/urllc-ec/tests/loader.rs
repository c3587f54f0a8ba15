use std::path::Path;

use proptest::prelude::*;
use urllc_ec::{load_scenario, parse_scenario, to_json, LoadError};
use urllc_ec_core::fbl::{required_blocklength, transmission_time};
use urllc_ec_core::scenario::Source;

fn parse(text: &str) -> Result<urllc_ec_core::Scenario, LoadError> {
    parse_scenario(text, Path::new("inline.json"))
}

#[test]
fn perfect_channels() {
    let s = parse(r#"{"p1": 1, "p2": 1, "p3": 1, "d_max": 1, "service_rate_S": 3}"#).unwrap();
    assert_eq!((s.p1, s.p2, s.p3), (1.0, 1.0, 1.0));
    assert_eq!(s.service_rate_source, Source::Given);
    assert_eq!(s.t_tx_source, Source::Derived);
    assert_eq!(s.n_max, 1);
}

#[test]
fn service_rate_from_snr() {
    let s = parse(
        r#"{"p1": 1, "p2": 1, "p3": 1, "d_max": 1, "snr": 15, "payload_L": 256, "epsilon": 1e-5, "bandwidth_B": 2e7}"#,
    )
    .unwrap();
    let r = required_blocklength(15.0, 256.0, 1e-5).unwrap();
    assert_eq!(s.service_rate_source, Source::FiniteBlocklength);
    assert!((s.service_rate - 256.0 / r).abs() < 1e-12);
    assert!((s.budget.t_tx - transmission_time(r, 2e7).unwrap()).abs() < 1e-15);
}

#[test]
fn calibration_block_sets_product() {
    let s = parse(
        r#"{"p1": 0.9999, "p3": 0.9999, "d_max": 5,
            "calibration": {"service_rate_S": 3, "success_product": 0.9994}}"#,
    )
    .unwrap();
    assert!((s.p1 * s.p2 - 0.9994).abs() < 1e-15);
    assert_eq!(s.p2_source, Source::Calibrated);
    assert_eq!(s.service_rate_source, Source::Calibrated);
}

#[test]
fn invalid_probability_names_field() {
    let err = parse(r#"{"p1": 1.2, "p2": 1, "p3": 1, "d_max": 1, "service_rate_S": 3}"#).unwrap_err();
    assert!(matches!(err, LoadError::Invalid { .. }));
    assert!(err.to_string().contains("p1 out of [0,1]"), "{err}");
}

#[test]
fn unknown_keys_rejected() {
    let err = parse(r#"{"p1": 1, "p2": 1, "p3": 1, "d_max": 1, "service_rate_S": 3, "colour": "red"}"#).unwrap_err();
    assert!(matches!(err, LoadError::Parse { .. }));
    assert!(err.to_string().contains("colour"), "{err}");

    let err = parse(r#"{"p1": 1, "p2": 1, "p3": 1, "d_max": 1, "service_rate_S": 3, "mobility": {"velocity_v": 3, "carrier_fc": 2.4e9, "x": 1}}"#)
        .unwrap_err();
    assert!(matches!(err, LoadError::Parse { .. }));
}

#[test]
fn conflicting_sources_rejected() {
    let err = parse(
        r#"{"p1": 1, "p2": 1, "p3": 1, "d_max": 1, "service_rate_S": 3,
            "calibration": {"service_rate_S": 2}}"#,
    )
    .unwrap_err();
    assert!(err.to_string().contains("service_rate_S"), "{err}");
}

#[test]
fn undeliverable_deadline_rejected() {
    let err = parse(r#"{"p1": 1, "p2": 1, "p3": 1, "d_max": 0.1, "service_rate_S": 3}"#).unwrap_err();
    assert!(err.to_string().contains("d_max"), "{err}");
}

#[test]
fn missing_file_is_io_error() {
    let err = load_scenario("/nonexistent/scenario.json").unwrap_err();
    assert!(matches!(err, LoadError::Io { .. }));
    assert!(err.to_string().contains("/nonexistent/scenario.json"));
}

#[test]
fn shipped_scenarios_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let s = load_scenario(dir.join("tradeoff.json")).unwrap();
    assert_eq!(s.n_max, 3);
    let files = urllc_ec::table::scenario_files(&dir.join("use_cases")).unwrap();
    assert_eq!(files.len(), 6);
    for f in files {
        let s = load_scenario(&f).unwrap();
        assert!(s.use_case.is_some());
        assert!((s.success_probability() - 0.9994).abs() < 1e-12);
        assert_eq!(s.service_rate, 3.0);
    }
}

#[test]
fn mobility_round_trips() {
    let text = r#"{"p1": 1, "p2": 1, "p3": 1, "d_max": 1, "service_rate_S": 3, "mobility": {"velocity_v": 3, "carrier_fc": 2.4e9}}"#;
    let s = parse(text).unwrap();
    let t = s.coherence_time().unwrap().unwrap();
    assert!((t - 17.6).abs() < 0.1);
    assert_eq!(parse(&to_json(&s)).unwrap().spec(), s.spec());
}

proptest! {
    #[test]
    fn given_fields_round_trip_bit_exactly(
        p1 in 0.0..=1.0f64,
        p2 in 0.0..=1.0f64,
        p3 in 0.0..=1.0f64,
        s_rate in 0.01..10.0f64,
        slack in 0.01..20.0f64,
        d_feed in 0.0..2.0f64,
        n_max in 1u32..8,
        r_th in 0.0..0.999999999f64,
    ) {
        let spec = urllc_ec_core::ScenarioSpec {
            p1,
            p2: Some(p2),
            p3,
            service_rate_s: Some(s_rate),
            d_max: 0.5 + slack,
            d_feed: Some(d_feed),
            n_max: Some(n_max),
            r_th: Some(r_th),
            ..Default::default()
        };
        let s = urllc_ec_core::Scenario::from_spec(spec.clone()).unwrap();
        let back = parse(&to_json(&s)).unwrap();
        prop_assert_eq!(back.spec(), &spec);
        prop_assert_eq!(back.p1.to_bits(), p1.to_bits());
        prop_assert_eq!(back.d_max.to_bits(), spec.d_max.to_bits());
        prop_assert_eq!(back.r_th.to_bits(), r_th.to_bits());
    }
}
