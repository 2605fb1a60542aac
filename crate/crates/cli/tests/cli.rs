use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pmtherm(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmtherm"))
        .args(args)
        .arg("--output")
        .arg(out)
        .current_dir(workspace())
        .output()
        .expect("binary runs")
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn summary_row<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["description"] == name)
        .unwrap()
}

#[test]
fn relaxation_summary_values() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pmtherm(tmp.path(), &["relaxation"]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&tmp.path().join("relaxation_summary.json"));
    let stat = summary_row(&s, "statistical")["rho_dt"].as_f64().unwrap();
    assert!((stat - 0.3678794).abs() < 1e-7);
    assert_eq!(summary_row(&s, "statistical")["sigma_dt"].as_f64(), Some(1.0));
    assert_eq!(summary_row(&s, "direct")["rho_dt"].as_f64(), Some(0.0));
    assert!(summary_row(&s, "direct")["sigma_dt"].is_null());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("3.6787944117144233e-1"));
    for name in ["direct", "statistical", "poisson"] {
        let csv = fs::read_to_string(tmp.path().join(format!("relaxation_{name}.csv"))).unwrap();
        assert_eq!(csv.lines().next(), Some("t,rho,sigma"));
    }
}

#[test]
fn relaxation_single_description() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pmtherm(
        tmp.path(),
        &["relaxation", "--description", "direct", "--format", "json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let s = json(&tmp.path().join("relaxation_summary.json"));
    assert_eq!(s["rows"].as_array().unwrap().len(), 1);
    assert_eq!(summary_row(&s, "direct")["rho_dt"].as_f64(), Some(0.0));
    let tr = json(&tmp.path().join("relaxation_direct.json"));
    assert_eq!(tr["t"].as_array().unwrap().len(), tr["rho"].as_array().unwrap().len());
}

#[test]
fn relaxation_plateaus_ignore_step_count() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(pmtherm(&a, &["relaxation", "--steps", "10"]).status.code(), Some(0));
    assert_eq!(pmtherm(&b, &["relaxation", "--steps", "10000"]).status.code(), Some(0));
    let (sa, sb) = (
        json(&a.join("relaxation_summary.json")),
        json(&b.join("relaxation_summary.json")),
    );
    for name in ["direct", "statistical"] {
        for key in ["rho_before", "rho_dt", "rho_final"] {
            assert_eq!(summary_row(&sa, name)[key], summary_row(&sb, name)[key], "{name} {key}");
        }
    }
    assert_eq!(
        summary_row(&sa, "poisson")["rho_dt"],
        summary_row(&sb, "poisson")["rho_dt"]
    );
}

#[test]
fn unwritable_output_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("file");
    fs::write(&file, "x").unwrap();
    let out = pmtherm(&file.join("sub"), &["relaxation"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constant_scenario_is_exactly_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pmtherm(
        tmp.path(),
        &["jarzynski", "--scenario", "constant", "--samples", "5000"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = json(&tmp.path().join("jarzynski_report.json"));
    assert_eq!(r["estimator_mean"].as_f64(), Some(1.0));
    assert_eq!(r["passed"], Value::Bool(true));
    let csv = fs::read_to_string(tmp.path().join("work_samples.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("initial_energy,final_energy,work,stream_id,draw_id")
    );
    assert_eq!(csv.lines().count(), 5001);
}

#[test]
fn commuting_quench_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "jarzynski",
        "--scenario",
        "commuting-quench",
        "--samples",
        "100000",
        "--seed",
        "42",
    ];
    let out = pmtherm(tmp.path(), &args);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&tmp.path().join("jarzynski_report.json"));
    let df = -((1.0 + (-2.0f64).exp()) / (1.0 + (-1.0f64).exp())).ln();
    assert!((r["delta_f"].as_f64().unwrap() - df).abs() < 1e-12);
    let (mean, se) = (
        r["estimator_mean"].as_f64().unwrap(),
        r["standard_error"].as_f64().unwrap(),
    );
    assert!((mean - (-df).exp()).abs() <= 3.0 * se);
}

#[test]
fn wrong_delta_f_fails_but_writes_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pmtherm(
        tmp.path(),
        &["jarzynski", "--scenario", "commuting-quench", "--delta-f", "0.5"],
    );
    assert_eq!(out.status.code(), Some(1));
    let r = json(&tmp.path().join("jarzynski_report.json"));
    assert_eq!(r["passed"], Value::Bool(false));
    assert_eq!(r["delta_f_overridden"], Value::Bool(true));
}

#[test]
fn unknown_scenario_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        pmtherm(tmp.path(), &["jarzynski", "--scenario", "bogus"]).status.code(),
        Some(2)
    );
}

#[test]
fn custom_schedule_from_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pmtherm(
        tmp.path(),
        &[
            "jarzynski",
            "--config",
            "configs/custom_jarzynski.toml",
            "--format",
            "json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&tmp.path().join("jarzynski_report.json"));
    assert_eq!(r["scenario"], "custom");
    let target = r["target"].as_f64().unwrap();
    assert!((r["exact_sector_sum"].as_f64().unwrap() - target).abs() < 1e-12);
    assert!((r["exact_operator_trace"].as_f64().unwrap() - target).abs() < 1e-12);
    let samples = json(&tmp.path().join("work_samples.json"));
    assert_eq!(samples.as_array().unwrap().len(), 50_000);
}

#[test]
fn default_scheme_ledger_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pmtherm(tmp.path(), &["scheme", "--seed", "7", "--samples", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.contains("sigma=(1,1,1) runs=10000 experimenter=+2 M=+1 S=-3"),
        "{stdout}"
    );
    let r = json(&tmp.path().join("scheme_report.json"));
    assert_eq!(r["passed"], Value::Bool(true));
    assert_eq!(r["mean_work_gap"].as_f64(), Some(3.0));
    let classes = r["ledger_classes"].as_array().unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0]["experimenter"].as_f64(), Some(2.0));
    assert_eq!(classes[0]["meter_reader"].as_f64(), Some(1.0));
    assert_eq!(classes[0]["measured"].as_f64(), Some(-3.0));
    let csv = fs::read_to_string(tmp.path().join("scheme_runs.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 16);
    assert_eq!(csv.lines().count(), 10_001);
}

#[test]
fn eigenstate_prep_books_no_entropy() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pmtherm(
        tmp.path(),
        &["scheme", "--eigenstate-prep", "--samples", "500", "--format", "json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = json(&tmp.path().join("scheme_report.json"));
    for class in r["ledger_classes"].as_array().unwrap() {
        assert!(class["sigmas"]
            .as_array()
            .unwrap()
            .iter()
            .all(|s| s.as_f64() == Some(0.0)));
    }
    let runs = fs::read_to_string(tmp.path().join("scheme_runs.jsonl")).unwrap();
    assert_eq!(runs.lines().count(), 500);
    for line in runs.lines() {
        let rec: Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec["sigma_total"].as_f64(), Some(0.0));
    }
}

#[test]
fn round_trip_report_has_four_passing_stages() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pmtherm(tmp.path(), &["scheme", "--samples", "200", "--verify-appendix-b"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&tmp.path().join("round_trips.json"));
    let stages = r["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 4);
    assert!(stages.iter().all(|s| s["passed"] == Value::Bool(true)));
}

#[test]
fn failing_scheme_still_writes_its_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("ramp.toml");
    fs::write(
        &cfg,
        "[scheme]\neigenstate_prep = true\nbias = 0.4\nbias_end = 0.1\nn_samples = 300\n",
    )
    .unwrap();
    let out = pmtherm(&tmp.path().join("out"), &["scheme", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&tmp.path().join("out/scheme_report.json"));
    assert_eq!(r["passed"], Value::Bool(false));
}

#[test]
fn shipped_configs_parse_and_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["scheme", "--config", "configs/default.toml", "--samples", "1000"],
        &[
            "scheme",
            "--config",
            "configs/three_site_scheme.toml",
            "--samples",
            "1000",
        ],
        &["scheme", "--config", "configs/eigenstate_scheme.toml"],
        &["relaxation", "--config", "configs/default.toml"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let out = pmtherm(&tmp.path().join(k.to_string()), args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
