use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn haarlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haarlab")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("experiment.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sq_bound_reports_all_intermediates() {
    let out = haarlab(&["sq-bound", "--group", "su", "--qubits", "10", "--tau", "0.1", "--epsilon", "0.1", "--beta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    for key in ["config", "results", "checks", "timing"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    let extras = &r["results"][0]["extras"];
    for key in ["M", "Delta", "xi", "f_bound", "u_bound", "q_lower"] {
        assert!(extras[key].is_number(), "missing {key}");
    }
    assert!((extras["xi"].as_f64().unwrap() - 0.152254).abs() < 1e-6);
    assert_eq!(extras["no_nontrivial_bound"], Value::Bool(true));
}

#[test]
fn tv_distance_example_lands_in_band() {
    let out = haarlab(&["tv-distance", "--group", "so", "--qubits", "10", "--samples", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let est = &r["results"][0];
    assert!(est["estimate"]["value"].is_number() && est["estimate"]["std_error"].is_number());
    assert_eq!(est["band"].as_array().unwrap().len(), 2);
    assert_eq!(r["checks"]["all_passed"], Value::Bool(true));
    assert_eq!(r["config"]["seed"], 7);
}

#[test]
fn identical_seeds_give_identical_reports() {
    let args = ["moment", "--group", "sp", "--dim", "2", "--k", "2", "--polynomials", "2", "--samples", "5000", "--seed", "9"];
    let (a, b) = (report(&haarlab(&args)), report(&haarlab(&args)));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["checks"], b["checks"]);
    let c = report(&haarlab(&["moment", "--group", "sp", "--dim", "2", "--k", "2", "--polynomials", "2", "--samples", "5000", "--seed", "10"]));
    assert_ne!(a["results"], c["results"]);
}

#[test]
fn failing_check_exits_with_one() {
    let out = haarlab(&["moment", "--group", "su", "--dim", "4", "--k", "2", "--polynomials", "1", "--samples", "2000", "--tolerance-se", "1e-12"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["checks"]["all_passed"], Value::Bool(false));
}

#[test]
fn config_errors_exit_with_two() {
    let missing = haarlab(&["sq-bound", "--qubits", "10", "--tau", "0.1", "--epsilon", "0.1", "--beta", "0.5"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("params.group"));

    let domain = haarlab(&["sq-bound", "--group", "su", "--qubits", "10", "--tau", "0.2", "--epsilon", "0.2", "--beta", "0.5"]);
    assert_eq!(domain.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&domain.stderr).contains("ε ≤ M_G − Δ_G − 2τ"));

    assert_eq!(haarlab(&["sample", "--group", "xx", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(haarlab(&["sample", "--group", "su", "--dim", "5000"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "command = \"moment\"\n[params]\ngroup = \"su\"\nsampels = 10\n");
    let bad = haarlab(&["run", "--config", &path]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("sampels"));
}

#[test]
fn empty_grid_succeeds_with_no_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "command = \"tv-distance\"\n[params]\ngroup = \"su\"\n[grid]\nqubits = []\n");
    let out = haarlab(&["run", "--config", &path]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"].as_array().unwrap().len(), 0);
    assert_eq!(r["checks"]["all_passed"], Value::Bool(true));
}

#[test]
fn grid_run_writes_valid_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let path = write_config(
        dir.path(),
        &format!(
            "command = \"concentration\"\nseed = 4\noutput_dir = {:?}\n[params]\nsamples = 1000\ndim = 16\n[grid]\ngroup = [\"so\", \"sp\"]\n",
            out_dir.to_str().unwrap()
        ),
    );
    let out = haarlab(&["run", "--config", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(r["results"].as_array().unwrap().len(), 2);
    assert_eq!(r["config"]["grid"]["group"][1], "sp");
    for i in 0..2 {
        let mut csv = csv_rows(&out_dir.join(format!("point{i}_tail.csv")));
        assert_eq!(csv.remove(0), vec!["tau", "empirical", "bound", "se"]);
        assert_eq!(csv.len(), 10);
        assert!(csv.iter().all(|row| row.iter().all(|x| x.parse::<f64>().is_ok())));
    }
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sample_and_tv_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = haarlab(&["sample", "--group", "sp", "--dim", "2", "--samples", "2", "--output-dir", d]);
    assert_eq!(out.status.code(), Some(0));
    // Sp(2) acts on C^4: four rows of interleaved (re, im) pairs.
    let rows = csv_rows(&dir.path().join("element_1.csv"));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.len() == 8));

    let out = haarlab(&["sample", "--group", "so", "--qubits", "3", "--states", "--output-dir", d]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&dir.path().join("state_0.csv"))[0], vec!["index", "re", "im"]);

    let out = haarlab(&["tv-distance", "--group", "sp", "--qubits", "6", "--samples", "50", "--route", "elements", "--output-dir", d]);
    assert_eq!(out.status.code(), Some(0));
    let born = csv_rows(&dir.path().join("born.csv"));
    assert_eq!(born.len(), 1 + 64);
    let total: f64 = born[1..].iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn calculators_and_checks() {
    let r = report(&haarlab(&["complexity-bound", "--group", "su", "--qubits", "8", "--r", "2", "--delta", "0.1", "--k", "6"]));
    assert!((r["results"][0]["design_low_complexity"]["raw_value"].as_f64().unwrap() - 82944.0).abs() < 1e-6);
    let r = report(&haarlab(&["packing", "--group", "so", "--dim", "1024", "--delta", "0.5"]));
    assert!((r["results"][0]["value"].as_f64().unwrap() - 1.1741924548876449).abs() < 1e-12);
    let r = report(&haarlab(&["packing", "--group", "su", "--dim", "4096", "--k", "4", "--corollary"]));
    assert!(r["results"][0]["extras"]["scaling_exponent"].is_number());

    let out = haarlab(&["twirl-check", "--group", "so", "--dim", "2", "--k", "2", "--inputs", "2", "--samples", "5000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"][0]["basis"]["size"], 6);
    let out = haarlab(&["concentration", "--group", "su", "--dim", "16", "--samples", "2000"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn quick_verify_passes() {
    let out = haarlab(&["verify", "--scale", "quick", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["checks"]["items"].as_array().unwrap().len(), 9);
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().filter(|l| l.starts_with("PASS")).count(), 9);
}
