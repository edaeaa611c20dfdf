use std::process::{Command, Output};

use serde_json::Value;

fn supnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supnorm"))
        .args(args)
        .env_remove("SUPNORM_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(supnorm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(supnorm(&["kloosterman", "--m", "1"]).status.code(), Some(2));
    // 4 is not square-free
    assert_eq!(supnorm(&["kloosterman", "--m", "1", "--n", "1", "--c", "4", "--level", "4"]).status.code(), Some(2));
    assert_eq!(supnorm(&["transform", "--a", "3", "--b", "2", "--k", "4"]).status.code(), Some(2));
    assert_eq!(supnorm(&["verify", "--box-cap", "0"]).status.code(), Some(2));
    assert_eq!(supnorm(&["--help"]).status.code(), Some(0));
}

#[test]
fn box_cap_exits_3() {
    let args = ["count", "a", "--c", "400", "--s", "800", "--r", "300", "--r-tilde", "300", "--u", "2", "--level", "7"];
    let capped: Vec<&str> = args.iter().copied().chain(["--box-cap", "1000"]).collect();
    let out = supnorm(&capped);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn time_budget_exits_3() {
    let out = supnorm(&["verify", "arith/*", "--time-budget", "0.000001"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out)["properties"].as_array().unwrap().iter().any(|p| p["resource_capped"] == true));
}

#[test]
fn kloosterman_value() {
    let out = supnorm(&["kloosterman", "--m", "1", "--n", "2", "--c", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["re"].as_f64().unwrap() + 1.0 + 5f64.sqrt()).abs() < 1e-12);
    assert!(v["weil_ratio"].as_f64().unwrap() <= 1.0);
}

#[test]
fn exact_commands() {
    let v = json(&supnorm(&["transform", "--a", "8", "--b", "2", "--k", "4"]));
    assert_eq!(v["over_pi"], "16/135135");
    let v = json(&supnorm(&["optimize"]));
    assert_eq!(v["exponent_n"], "-25/914");
    let v = json(&supnorm(&["approx", "--x", "355/113", "--h", "50"]));
    assert_eq!((v["a"].as_i64(), v["q"].as_u64()), (Some(22), Some(7)));
}

#[test]
fn verify_is_deterministic() {
    let a = supnorm(&["verify", "kloosterman/*", "--seed", "11"]);
    let b = supnorm(&["verify", "kloosterman/*", "--seed", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 11);
}

#[test]
fn csv_has_one_row_per_property() {
    let out = supnorm(&["verify", "arith/*", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4 + 1);
    assert!(text.starts_with("id,anchor,instances"));
}

#[test]
fn empty_selection_succeeds() {
    let out = supnorm(&["verify", "no-such-module/*"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["properties"].as_array().unwrap().is_empty());
}

#[test]
fn transforms_selection_covers_enough_instances() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = supnorm(&["verify", "transforms/*", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let props = v["properties"].as_array().unwrap();
    assert_eq!(props.len(), 4);
    let total: u64 = props.iter().map(|p| p["instances"].as_u64().unwrap()).sum();
    assert!(total >= 20, "{total}");
}

#[test]
fn config_from_environment_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# test config\nseed = 5\nformat = csv\n").unwrap();
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_supnorm"))
            .args(["verify", "arith/*"])
            .args(extra)
            .env("SUPNORM_CONFIG", &cfg)
            .output()
            .unwrap()
    };
    let out = run(&[]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("id,"));
    let out = run(&["--format", "json", "--seed", "9"]);
    assert_eq!(json(&out)["seed"], 9);

    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn upper_case_flag_spellings() {
    let v = json(&supnorm(&["bessel", "--fn", "Kimag", "--t", "0", "--y", "1"]));
    assert!((v["value"].as_f64().unwrap() - 0.421_024_438_240_708_3).abs() < 1e-9);
    let v = json(&supnorm(&["transform", "--A", "8", "--B", "2", "--k", "4", "--method", "both"]));
    assert!(v["relative_error"].as_f64().unwrap() < 1e-8);
    let v = json(&supnorm(&["decay", "--Z", "1e4", "--T", "1e3", "--alpha", "1/3"]));
    assert!(v["ratio"].as_f64().unwrap() < 1.0);
    let v = json(&supnorm(&["vintegral", "--kind", "maass", "--t", "1", "--Z", "100", "--T", "50", "--alpha", "3"]));
    assert!(v["ratio"].as_f64().unwrap() < 50.0);
    let out = supnorm(&["count", "Asq", "--C", "4", "--S", "8", "--R", "3", "--R-tilde", "3", "--u", "2", "--N", "7"]);
    assert!(out.status.success());
    let out = supnorm(&["amplifier", "--L", "30", "--N", "5", "--is-variant", "--seed", "3"]);
    let d = json(&out)["diagonal"][0].as_f64().unwrap();
    assert!(d > 0.0);
    let v = json(&supnorm(&["optimize", "--emit-trace"]));
    assert!(v["trace"].is_array());
    assert!(json(&supnorm(&["optimize"])).get("trace").is_none());
}
