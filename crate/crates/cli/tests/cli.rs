//! Binary-level tests: subcommand wiring, exit codes, file outputs, and
//! run-to-run determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_solspec");

fn asos_sample_path() -> String {
    format!("{}/../../data/asos_sample.csv", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--output")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn ingest_bundled_sample() {
    let dir = TempDir::new().unwrap();
    let out = run(
        &["ingest", "--input", &asos_sample_path(), "--format", "csv,json"],
        dir.path(),
    );
    assert_success(&out);

    let csv = fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 15); // header + 14 rows
    assert_eq!(
        lines[0],
        "timestamp,ghi_w_m2,ghi_missing,cos_zenith,cloud_factor,visibility_km"
    );
    assert!(lines[1].starts_with("2024-01-01T00:00:00,0,true,"));

    let json = fs::read_to_string(dir.path().join("samples.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 14);
}

#[test]
fn missing_input_names_path() {
    let dir = TempDir::new().unwrap();
    let out = run(&["ingest", "--input", "/nonexistent/file.csv"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("/nonexistent/file.csv"), "{stderr}");
}

#[test]
fn corrupt_row_names_row_number() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(
        &bad,
        "0,2024.1.1 00:00:00,,0,394\n1,2024.1.1 01:00:00,,99,400\n",
    )
    .unwrap();
    let out = run(&["ingest", "--input", bad.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("row 2"), "{stderr}");
}

#[test]
fn estimate_emits_spec_columns_and_night_zeros() {
    let dir = TempDir::new().unwrap();
    assert_success(&run(&["synth", "--mode", "clear"], dir.path()));
    let synth = dir.path().join("synthetic_asos.csv");
    let out = run(
        &["estimate", "--input", synth.to_str().unwrap()],
        dir.path(),
    );
    assert_success(&out);

    let csv = fs::read_to_string(dir.path().join("estimates.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "timestamp,ghi_w_m2,cos_zenith,dni0,dni1,dni_final,night,anomalous"
    );
    // midnight January 1st is night: all three stages zero
    let first = lines.next().unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(&fields[3..7], &["0", "0", "0", "true"]);
    assert_eq!(csv.lines().count(), 8785);
}

#[test]
fn estimate_accepts_normalized_samples_too() {
    let dir = TempDir::new().unwrap();
    assert_success(&run(&["synth", "--mode", "cloudy"], dir.path()));
    let synth = dir.path().join("synthetic_asos.csv");
    assert_success(&run(
        &["ingest", "--input", synth.to_str().unwrap()],
        dir.path(),
    ));
    assert_success(&run(
        &["estimate", "--input", synth.to_str().unwrap()],
        dir.path(),
    ));
    let from_raw = fs::read_to_string(dir.path().join("estimates.csv")).unwrap();

    let dir2 = TempDir::new().unwrap();
    let samples = dir.path().join("samples.csv");
    assert_success(&run(
        &["estimate", "--input", samples.to_str().unwrap()],
        dir2.path(),
    ));
    let from_samples = fs::read_to_string(dir2.path().join("estimates.csv")).unwrap();
    assert_eq!(from_raw, from_samples);
}

#[test]
fn uncorrected_mode_collapses_stages() {
    let dir = TempDir::new().unwrap();
    assert_success(&run(&["synth", "--mode", "cloudy"], dir.path()));
    let synth = dir.path().join("synthetic_asos.csv");
    let out = run(
        &[
            "estimate",
            "--input",
            synth.to_str().unwrap(),
            "--uncorrected",
        ],
        dir.path(),
    );
    assert_success(&out);
    let csv = fs::read_to_string(dir.path().join("estimates.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[3], fields[4], "{line}");
        assert_eq!(fields[3], fields[5], "{line}");
    }
}

#[test]
fn spectrum_output_reintegrates_to_requested_total() {
    let dir = TempDir::new().unwrap();
    let out = run(&["spectrum", "--dni", "500"], dir.path());
    assert_success(&out);
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut wavelength = Vec::new();
    let mut irradiance = Vec::new();
    for line in csv.lines().skip(1) {
        let (w, v) = line.split_once(',').unwrap();
        wavelength.push(w.parse::<f64>().unwrap());
        irradiance.push(v.parse::<f64>().unwrap());
    }
    assert_eq!(wavelength.len(), 1702);
    let total: f64 = (1..wavelength.len())
        .map(|i| (wavelength[i] - wavelength[i - 1]) * (irradiance[i] + irradiance[i - 1]) * 0.5)
        .sum();
    assert!(
        (total - 500.0).abs() / 500.0 < 1e-6,
        "re-integrated total {total}"
    );
}

#[test]
fn daily_covers_whole_year() {
    let dir = TempDir::new().unwrap();
    assert_success(&run(&["synth", "--mode", "clear"], dir.path()));
    let synth = dir.path().join("synthetic_asos.csv");
    let out = run(&["daily", "--input", synth.to_str().unwrap()], dir.path());
    assert_success(&out);
    let csv = fs::read_to_string(dir.path().join("daily.csv")).unwrap();
    assert_eq!(csv.lines().count(), 367); // header + 366 days
    assert_eq!(csv.lines().next().unwrap(), "date,mean_ghi,mean_dni,n_hours,n_anomalous");
}

#[test]
fn regress_is_deterministic_and_complete() {
    let dir = TempDir::new().unwrap();
    assert_success(&run(&["synth", "--mode", "cloudy"], dir.path()));
    let synth = dir.path().join("synthetic_asos.csv");
    let config = dir.path().join("hyper.json");
    fs::write(
        &config,
        r#"{"random_forest": {"n_estimators": 10}, "mlp": {"epochs": 10}}"#,
    )
    .unwrap();

    let args = [
        "regress",
        "--input",
        synth.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--format",
        "csv,json",
    ];
    let out = run(&args, dir.path());
    assert_success(&out);
    let report_a = fs::read_to_string(dir.path().join("regression_report.csv")).unwrap();
    let scatter_a = fs::read_to_string(dir.path().join("scatter.csv")).unwrap();
    let json_a = fs::read_to_string(dir.path().join("regression_report.json")).unwrap();

    let dir2 = TempDir::new().unwrap();
    fs::copy(&synth, dir2.path().join("synthetic_asos.csv")).unwrap();
    fs::copy(&config, dir2.path().join("hyper.json")).unwrap();
    let out = run(
        &[
            "regress",
            "--input",
            dir2.path().join("synthetic_asos.csv").to_str().unwrap(),
            "--config",
            dir2.path().join("hyper.json").to_str().unwrap(),
            "--format",
            "csv,json",
        ],
        dir2.path(),
    );
    assert_success(&out);
    let report_b = fs::read_to_string(dir2.path().join("regression_report.csv")).unwrap();
    let scatter_b = fs::read_to_string(dir2.path().join("scatter.csv")).unwrap();
    let json_b = fs::read_to_string(dir2.path().join("regression_report.json")).unwrap();

    assert_eq!(report_a, report_b);
    assert_eq!(scatter_a, scatter_b);
    assert_eq!(json_a, json_b);

    // five reports, all successful; scatter rows = 5 * n_test
    assert_eq!(report_a.lines().count(), 6);
    let stdout = String::from_utf8_lossy(&out.stdout);
    for model in [
        "poly_ridge",
        "decision_tree",
        "random_forest",
        "gradient_boosting",
        "mlp",
    ] {
        assert!(stdout.contains(model), "{stdout}");
        assert!(report_a.contains(model));
    }
    let n_test: usize = report_a
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(4)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(scatter_a.lines().count(), 1 + 5 * n_test);
    // hyperparameters recorded in every row, and no cell leaks a comma
    for line in report_a.lines().skip(1) {
        assert!(line.contains('='), "{line}");
        assert_eq!(line.split(',').count(), 7, "{line}");
    }
}

#[test]
fn report_emits_figures_and_tables() {
    let dir = TempDir::new().unwrap();
    assert_success(&run(&["synth", "--mode", "cloudy"], dir.path()));
    let synth = dir.path().join("synthetic_asos.csv");
    let out = run(
        &[
            "report",
            "--input",
            synth.to_str().unwrap(),
            "--uncorrected",
            "--format",
            "csv,json,svg",
        ],
        dir.path(),
    );
    assert_success(&out);
    for name in [
        "estimates.csv",
        "daily.csv",
        "monthly.csv",
        "anomalies.csv",
        "daily_time_series.svg",
        "ghi_daily.svg",
        "dni_daily.svg",
        "spectrum_peak_hour.csv",
        "spectrum_median_hour.csv",
        "estimates_uncorrected.csv",
        "dni_daily_uncorrected.svg",
        "report.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let svg = fs::read_to_string(dir.path().join("daily_time_series.svg")).unwrap();
    assert!(svg.contains("GHI") && svg.contains("DNI"));
}
