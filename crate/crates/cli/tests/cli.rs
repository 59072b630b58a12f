use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_canonphase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

#[test]
fn loss_of_one_is_rejected() {
    let o = run(&["curve", "--loss", "1.0", "--n-range", "1:10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("loss must be < 1"), "{}", stderr(&o));
    let o = run(&["curve", "--loss", "-0.2", "--n-range", "1:10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_arguments_are_usage_errors() {
    assert_eq!(run(&["curve", "--loss", "0.1", "--n-range", "0:10"]).status.code(), Some(2));
    assert_eq!(run(&["nopt", "--loss-grid", "0.1:0.2"]).status.code(), Some(2));
    assert_eq!(run(&["dist", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--max-2j", "25"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_fails() {
    let o = run(&["curve", "--loss", "0.1", "--n-range", "1:5", "--out", "/nonexistent/dir/x.csv"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cannot write"));
}

#[test]
fn curve_minimum_row_is_the_optimal_number() {
    let o = run(&["curve", "--loss", "0.3", "--n-range", "1:500", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<(u32, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 500);
    let best = rows
        .iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    assert_eq!(header_value(&text, "n_opt"), Some(best.0.to_string().as_str()));
    assert_eq!(header_value(&text, "sharpness"), Some("raw"));
}

#[test]
fn dist_header_records_the_integral() {
    let o = run(&["dist", "--n", "1", "--loss", "0.3", "--phi-samples", "64"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let integral: f64 = header_value(&text, "integral").unwrap().parse().unwrap();
    assert!((integral - 0.85).abs() < 1e-12);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "phi,p");
    assert_eq!(body.len(), 65);
}

#[test]
fn lossless_dist_is_normalized_and_peaked() {
    let o = run(&["dist", "--n", "2", "--loss", "0", "--phi-samples", "128"]);
    let text = stdout(&o);
    let integral: f64 = header_value(&text, "integral").unwrap().parse().unwrap();
    assert!((integral - 1.0).abs() < 1e-12);
    let p: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let peak = p.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(p[0], peak);
    for i in 1..64 {
        assert!((p[i] - p[128 - i]).abs() < 1e-14);
    }
}

#[test]
fn dist_below_nyquist_fails() {
    let o = run(&["dist", "--n", "20", "--phi-samples", "64"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("phi-samples"));
}

#[test]
fn normalized_flag_is_stamped() {
    let raw = run(&["dist", "--n", "3", "--loss", "0.3", "--phi-samples", "64"]);
    let norm = run(&["dist", "--n", "3", "--loss", "0.3", "--phi-samples", "64", "--normalized"]);
    assert_eq!(header_value(&stdout(&norm), "sharpness"), Some("normalized"));
    let s_raw: f64 = header_value(&stdout(&raw), "sharpness_value").unwrap().parse().unwrap();
    let s_norm: f64 = header_value(&stdout(&norm), "sharpness_value").unwrap().parse().unwrap();
    let integral: f64 = header_value(&stdout(&raw), "integral").unwrap().parse().unwrap();
    assert!((s_norm - s_raw / integral).abs() < 1e-14);

    let c = run(&["curve", "--loss", "0.1", "--n-range", "1:20", "--normalized", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&c)).unwrap();
    assert_eq!(v["config"]["sharpness"], "normalized");
}

#[test]
fn nopt_grid_with_zero_loss() {
    let o = run(&["nopt", "--loss-grid", "0:0.5:3", "--n", "300"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "loss,n_opt");
    assert!(body[1].ends_with(",none"));
    assert_eq!(body.len(), 4);
}

#[test]
fn nopt_log_grid_is_monotone_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let o = run(&[
            "nopt",
            "--loss-grid",
            "1e-4:0.5:40:log",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(Path::new(&path.with_extension("gp")).exists());
        files.push(std::fs::read_to_string(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let n: Vec<u32> = files[0]
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(n.len(), 40);
    assert!(n.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn json_curve_layout() {
    let o = run(&["curve", "--loss", "0", "--n-range", "1:5", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["command"], "curve");
    assert_eq!(v["config"]["n_range"], "1:5");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let mut keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["delta_phi", "heisenberg", "n", "shot_noise"]);
    assert_eq!(rows[1]["n"], 2);
    assert!((rows[1]["delta_phi"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["summary"]["n_opt"], "none");
}

#[test]
fn csv_output_gets_a_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let o = run(&["curve", "--loss", "1e-3", "--n-range", "1:200", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let script = std::fs::read_to_string(dir.path().join("curve.gp")).unwrap();
    assert!(script.contains("'curve.csv'"));
    assert!(script.contains("set logscale xy"));
}

#[test]
fn jobs_flag_does_not_change_output() {
    let one = run(&["--jobs", "1", "curve", "--loss", "0.01", "--n-range", "1:300"]);
    let many = run(&["curve", "--loss", "0.01", "--n-range", "1:300", "--jobs", "4"]);
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(run(&["--jobs", "0", "validate"]).status.code(), Some(2));
}

#[test]
fn validate_prints_a_table() {
    let o = run(&["validate", "--max-2j", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 7);
}
