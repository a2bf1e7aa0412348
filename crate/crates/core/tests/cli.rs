use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebarch"))
        .args(args)
        .env_remove("CHEBARCH_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn run_in(out_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebarch"))
        .args(args)
        .env("CHEBARCH_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn nodes_degree_seven() {
    let v = json(&run(&["nodes", "--degree", "7"]));
    let nodes: Vec<f64> = v["nodes"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(nodes.len(), 8);
    assert!(nodes.windows(2).all(|p| p[0] < p[1]));
    assert!((nodes[7] - 0.980785).abs() < 1e-6);
    assert_eq!(v["degree"], 7);
    assert_eq!(v["interval"]["lo"], -1.0);
}

#[test]
fn nodes_degree_zero_and_shifted() {
    let v = json(&run(&["nodes", "--degree", "0"]));
    assert_eq!(v["nodes"], serde_json::json!([0.0]));
    let v = json(&run(&["nodes", "--degree", "7", "--interval", "0", "2"]));
    let nodes = v["nodes"].as_array().unwrap();
    assert!(nodes.iter().all(|x| (0.0..2.0).contains(&x.as_f64().unwrap())));
}

#[test]
fn coeffs_json_fields() {
    let v = json(&run(&["coeffs", "--degree", "4", "--signal", "poly:1,2"]));
    for key in ["degree", "nodes", "coeffs", "interval"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn compare_csv_and_ratio() {
    let out = run(&["compare", "--n-min", "6", "--n-max", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("signal,scheme,n_points,max_abs_error,relative_error_percent"));
    assert_eq!(lines.count(), 10);
    let err = stderr(&out);
    let ratio: f64 = err
        .split("ratio equispaced/chebyshev at n=8: ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .unwrap();
    assert!((3.0..=5.0).contains(&ratio));
}

#[test]
fn compare_constant_signal_zero_error() {
    let out = run(&["compare", "--signal", "const:3", "--format", "json", "--n-max", "8"]);
    let v = json(&out);
    for row in v.as_array().unwrap() {
        assert!(row["report"]["relative_error_percent"].as_f64().unwrap() < 1e-12);
    }
    assert!(stderr(&out).contains("undefined"));
}

#[test]
fn compare_unreachable_target_is_reported() {
    let out = run(&["compare", "--target", "0.001", "--n-max", "6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not reached"));
}

#[test]
fn compare_parallel_output_identical() {
    let serial = run(&["compare", "--signal", "damped", "--n-max", "14"]);
    let parallel = run(&["compare", "--signal", "damped", "--n-max", "14", "--jobs", "4"]);
    assert!(parallel.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn compare_curves_and_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["compare", "--output", "errors.csv", "--curves", "curves.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let curves = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert_eq!(curves.lines().next(), Some("x,signal,chebyshev,equispaced"));
    assert_eq!(curves.lines().count(), 2002);
    assert!(dir.path().join("errors.csv").exists());
}

#[test]
fn systolic_window_eight() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["systolic", "--trace", "trace.csv", "--outputs", "out.csv"]);
    let v = json(&out);
    assert_eq!(v["latency"], 16);
    assert_eq!(v["hue_percent"], 100.0);
    assert_eq!(v["buffering"], "none");
    assert_eq!(v["io_type"], "word_serial");
    for key in ["peak_ops_coeff", "peak_ops_poly", "peak_ops_fir"] {
        assert_eq!(v[key], 8);
    }
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("cycle,stage,unit_id,busy,op_count,mux_state\n"));
    let outputs = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(outputs.lines().count(), 9);
}

#[test]
fn systolic_reference_architecture() {
    let v = json(&run(&["systolic", "--arch", "zhu_time"]));
    assert_eq!(v["io_type"], "word_parallel");
    assert_eq!(v["buffering"], "samples_and_T");
    assert_eq!(v["peak_ops_coeff"], ">8,stored");
    let v = json(&run(&["systolic", "--arch", "zhu_transform"]));
    assert_eq!(v["buffering"], "T_only");
    assert_eq!(v["peak_ops_poly"], "stored");
}

#[test]
fn systolic_constant_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["systolic", "--signal", "const:1.5", "--queries", "-0.9,0,0.4", "--outputs", "o.csv"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("o.csv")).unwrap();
    for line in text.lines().skip(1) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 1.5).abs() < 1e-12);
    }
}

#[test]
fn power_defaults() {
    let v = json(&run(&["power"]));
    assert_eq!(v["total_au"], 1552);
    assert_eq!(v["baseline_au"], 2560);
    assert_eq!((v["a_flash"].as_u64(), v["a_sar"].as_u64()), (Some(6), Some(2)));
    assert!((v["savings_percent"].as_f64().unwrap() - 39.375).abs() < 0.1);
    assert_eq!(v["assignments"].as_array().unwrap().len(), 8);
}

#[test]
fn power_damped_baseline() {
    let v = json(&run(&["power", "--signal", "damped"]));
    assert!((v["savings_percent"].as_f64().unwrap() - 44.886).abs() < 0.1);
}

#[test]
fn power_slow_sar_degenerates_to_flash() {
    let v = json(&run(&["power", "--t-sar", "inf"]));
    assert_eq!(v["a_sar"], 0);
    assert_eq!(v["total_au"], 8 * 256);
    assert_eq!(v["savings_percent"], 20.0);
    let v = json(&run(&["power", "--t-sar", "inf", "--baseline-points", "8"]));
    assert!(v["savings_percent"].as_f64().unwrap() <= 0.0);
}

#[test]
fn validation_errors_exit_two() {
    for args in [
        &["compare", "--grid-density", "10"][..],
        &["compare", "--interval", "1", "1"],
        &["power", "--bits", "0"],
        &["power", "--policy", "random"],
        &["systolic", "--arch", "nope"],
        &["power", "--signal", "poly:1,2"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains("error:"), "{args:?}");
    }
    let out = run(&["compare", "--grid-density", "10"]);
    assert!(stderr(&out).contains("grid_density"));
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "signal = damped\nbits = 8\n# comment\n").unwrap();
    let v = json(&run(&["power", "--config", cfg.to_str().unwrap(), "--bits", "8"]));
    assert_eq!(v["signal"], "damped");
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run(&["power", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    for args in [&["compare"][..], &["systolic"], &["power"], &["repro", "--json"]] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn repro_json_and_tampering() {
    let out = run(&["repro", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["criteria"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let passed = v["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 1 }));

    let out = run(&["repro", "--set", "latency=15"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("[FAIL] 5.")), "{text}");
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(run(&["repro", "--set", "bogus=1"]).status.code(), Some(2));
}
