use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn numrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_numrad")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a json report")
}

fn payload(out: &Output) -> String {
    let mut v = report(out);
    v.as_object_mut().unwrap().remove("wall_time_s");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn radius_of_the_shift_matches_closed_form() {
    let out = numrad(&["radius", &data("shift4.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let got = r["results"]["numerical_radius"]["value"].as_f64().unwrap();
    assert!((got - (std::f64::consts::PI / 5.0).cos()).abs() < 1e-9);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    assert!(r["wall_time_s"].is_number());
}

#[test]
fn repeated_runs_give_identical_payloads() {
    let a = numrad(&["radius", &data("shift4.json"), "--seed", "3"]);
    let b = numrad(&["radius", &data("shift4.json"), "--seed", "3"]);
    assert_eq!(payload(&a), payload(&b));
}

#[test]
fn range_sample_is_written_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("range.csv");
    let out = numrad(&["radius", &data("shift4.json"), "--samples", "20", "--csv", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,value"));
    assert_eq!(lines.count(), 20);
}

#[test]
fn malformed_inputs_exit_with_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"space": {"dim": 2, "p": 0.5}, "operator": [[1,0],[0,1]]}"#, "space.p"),
        (r#"{"space": {"dim": 2, "p": 2}, "operator": [[1,0],[0]]}"#, "operator"),
        (r#"{"space": {"dim": 2, "p": 2}, "operator": [[1,0],[0,1]], "bogus": 1}"#, "bogus"),
        ("not json", ""),
    ];
    for (i, (body, field)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&path, body).unwrap();
        let out = numrad(&["radius", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "case {i}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(field), "case {i}");
    }
    assert_eq!(numrad(&["radius", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(numrad(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn fourier_degree_zero_is_the_constant_projection() {
    let out = numrad(&["fourier", "-n", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let l = r["results"]["lebesgue_constant"]["value"].as_f64().unwrap();
    assert!((l - 1.0).abs() < 1e-12, "{l}");
}

#[test]
fn fourier_rejects_a_coarse_grid() {
    assert_eq!(numrad(&["fourier", "-n", "3", "--points", "8"]).status.code(), Some(2));
}

#[test]
fn unicity_instance_without_strong_unicity() {
    let out = numrad(&["unicity", "--instance", "normone", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["results"]["r_hat"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn averaging_with_the_cyclic_group() {
    let out = numrad(&["average", &data("constants_cyclic.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["passed"], Value::Bool(true));
}

#[test]
fn example_fixture_reference_is_strongly_unique() {
    let out = numrad(&["unicity", &data("example_l43.json"), "--samples", "300"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!((r["results"]["reference_value"].as_f64().unwrap() - 1.02751).abs() < 2e-3);
    assert!(r["results"]["r_hat"].as_f64().unwrap() > 1e-4);
}
