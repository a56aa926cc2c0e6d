use std::process::{Command, Output};

use polymod::combinatorics::sample_weight_seeded;
use polymod::fiber::hexahedron_pair;
use polymod::moduli::psi6;
use serde_json::Value;

fn polymod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polymod")).args(args).env_remove("POLYMOD_CONFIG").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.17}")).collect::<Vec<_>>().join(",")
}

#[test]
fn forward_equal_pentagon() {
    let out = polymod(&["forward", "--n", "5", "--theta", "equal", "--label", "12345"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], "polymod-forward/1");
    let p = v["shape"]["P"].as_f64().unwrap();
    assert!((p - 0.786_151_377_757_423).abs() < 1e-12);
    assert_eq!(v["admissible"], true);
}

#[test]
fn forward_accepts_pi_expressions() {
    let out = polymod(&["forward", "--n", "6", "--theta", "pi/3,pi/3,pi/3,pi/3,pi/3,pi/3", "--label", "123456"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["classification"]["letter"], "a");
    for k in ["P", "Q", "R"] {
        assert!((v["shape"][k].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn invert_recovers_forward() {
    let theta = sample_weight_seeded(6, 5).unwrap();
    let (m1, m2) = hexahedron_pair();
    let s1 = psi6(&theta, &m1).unwrap().params();
    let s2 = psi6(&theta, &m2).unwrap().params();
    let out = polymod(&["invert", "--n", "6", "--shape1", &csv_list(&s1), "--shape2", &csv_list(&s2)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let back: Vec<f64> = v["theta"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in back.iter().zip(theta.angles()) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(v["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| polymod(args).status.code().unwrap();
    assert_eq!(code(&["forward", "--n", "5", "--theta", "1,1,1,1,1", "--label", "12345"]), 2);
    assert_eq!(code(&["forward", "--n", "7", "--theta", "equal", "--label", "1234567"]), 2);
    assert_eq!(code(&["invert", "--n", "5", "--shape1", "0.5,0.5", "--shape2", "0.5,0.5"]), 3);
    assert_eq!(code(&["complex", "--n", "6", "--report", "cusps", "--theta", "1,1,1,1,1,1.2831853071795865"]), 5);

    let theta = sample_weight_seeded(6, 9).unwrap();
    let (m1, m2) = hexahedron_pair();
    let s1 = psi6(&theta, &m1).unwrap().params();
    let mut s2 = psi6(&theta, &m2).unwrap().params();
    s2[2] *= 1.3;
    assert_eq!(code(&["invert", "--n", "6", "--shape1", &csv_list(&s1), "--shape2", &csv_list(&s2)]), 4);
}

#[test]
fn errors_are_reported_as_json() {
    let out = polymod(&["forward", "--n", "5", "--theta", "equal", "--label", "1234"]);
    let v = json(&out);
    assert_eq!(v["schema"], "polymod-error/1");
    assert_eq!(v["error"]["kind"], "DimensionMismatch");
    assert_eq!(v["error"]["exit_code"], 2);
}

#[test]
fn euler_report() {
    let v = json(&polymod(&["complex", "--n", "5", "--report", "euler"]));
    assert_eq!((v["V"].as_u64(), v["E"].as_u64(), v["F"].as_u64()), (Some(15), Some(30), Some(12)));
    assert_eq!(v["chi"], -3);
}

#[test]
fn adjacency_csv_has_one_row_per_pairing() {
    let out = polymod(&["complex", "--n", "6", "--report", "adjacency", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 181);
}

#[test]
fn sweep_skips_bad_rows() {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let input = dir.join("cli_sweep.csv");
    std::fs::write(&input, "a,b,c,d,e\nequal\n2pi/5,2pi/5,2pi/5,2pi/5,2pi/5\n1,1,1,1,1\n").unwrap();
    let out = polymod(&["sweep", "--n", "5", "--label", "12345", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "{text}");
    assert!(lines[0].starts_with("row,theta1"));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("row 2") && stderr.contains("row 4"), "{stderr}");
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let cfg = dir.join("bad_config.json");
    std::fs::write(&cfg, r#"{"samples": 10, "colour": "red"}"#).unwrap();
    let out = polymod(&["--config", cfg.to_str().unwrap(), "verify", "--suite", "signature"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_every_suite() {
    let v = json(&polymod(&["verify", "--samples", "20", "--seed", "3"]));
    assert_eq!(v["schema"], "polymod-verify/1");
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 11);
}
