use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mvmfdr::pattern::{beam_pattern_family, theta_grid};
use mvmfdr::scenario::DiagonalLoading;
use mvmfdr::Complex64;
use mvmfdr_cli::output::{format_g, read_weights_csv};
use mvmfdr_cli::{parse_config_str, CliError};
use tempfile::TempDir;

const PAPER: &str = include_str!("../scenarios/paper_scenario.toml");

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mvmfdr"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn mvmfdr(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn compare_writes_both_pattern_families() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "paper.toml", PAPER);
    let out = dir.path().join("fig1.csv");
    let res = mvmfdr(&[
        "compare",
        "--config",
        s(&cfg),
        "--out",
        s(&out),
        "--covariance",
        "ideal",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "method,freq_hz,theta_deg,gain_db");
    assert!(!text.contains('\r'));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 5 * 721 * 2);
    for method in ["mvdr", "mvmfdr"] {
        let mine: Vec<_> = rows.iter().filter(|r| r[0] == method).collect();
        assert_eq!(mine.len(), 5 * 721);
        let mut freqs: Vec<&str> = mine.iter().map(|r| r[1].as_str()).collect();
        freqs.dedup();
        assert_eq!(
            freqs,
            ["3500000000", "3520000000", "3550000000", "3570000000", "3600000000"]
        );
        let peak = mine
            .iter()
            .map(|r| r[3].parse::<f64>().unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(peak, 0.0);
    }
    assert_eq!(rows[0][2], "-90");
    assert_eq!(rows[720][2], "90");

    let report = csv_rows(&dir.path().join("fig1.report.csv"));
    assert_eq!(report.len(), 2 * 14);
    let weights = csv_rows(&dir.path().join("fig1.weights.csv"));
    assert_eq!(weights.len(), 2 * 8);
}

#[test]
fn single_constraint_solve_gives_identical_designs() {
    let dir = TempDir::new().unwrap();
    let text = PAPER.replace(
        "constraint_freqs_hz = [3.50e9, 3.52e9, 3.55e9, 3.57e9, 3.60e9]",
        "constraint_freqs_hz = [3.55e9]",
    );
    let cfg = write_config(dir.path(), "k1.toml", &text);
    let out = dir.path().join("w.csv");
    let res = mvmfdr(&["solve", "--config", s(&cfg), "--out", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let w = read_weights_csv(&out).unwrap();
    assert_eq!(w.len(), 2);
    let print = |v: &[Complex64]| -> Vec<String> {
        v.iter()
            .map(|z| format!("{},{}", format_g(z.re, 12), format_g(z.im, 12)))
            .collect()
    };
    assert_eq!(print(&w[0].1), print(&w[1].1));
}

#[test]
fn montecarlo_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "paper.toml", PAPER);
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let res = mvmfdr(&["montecarlo", "--config", s(&cfg), "--out", s(&out), "--seed", seed]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        fs::read(out).unwrap()
    };
    let a = run("a.csv", "42");
    let b = run("b.csv", "42");
    let c = run("c.csv", "43");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "method,metric,mean,std");
    // sample covariance by default: the trials differ
    assert!(text
        .lines()
        .any(|l| l.starts_with("mvdr,output_sinr_db,") && !l.ends_with(",0")));
}

#[test]
fn structured_output_is_json() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "paper.toml", PAPER);
    let out = dir.path().join("fig1.json");
    let res = mvmfdr(&[
        "compare",
        "--config",
        s(&cfg),
        "--out",
        s(&out),
        "--format",
        "structured",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(doc["patterns"].as_array().unwrap().len(), 10);
    assert_eq!(doc["patterns"][0]["gain_db"].as_array().unwrap().len(), 721);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("fig1.report.json")).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 28);
    let weights: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("fig1.weights.json")).unwrap()).unwrap();
    assert_eq!(weights["designs"][1]["re"].as_array().unwrap().len(), 8);
}

#[test]
fn out_of_band_constraint_is_rejected_before_compute() {
    let dir = TempDir::new().unwrap();
    let text = PAPER.replace("3.60e9]", "3.70e9]");
    let cfg = write_config(dir.path(), "bad.toml", &text);
    let out = dir.path().join("fig1.csv");
    let res = mvmfdr(&["compare", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(res.status.code(), Some(i32::from(CliError::EXIT_INVALID)));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("field=scenario.constraint_freqs_hz"), "{stderr}");
    assert_eq!(stderr.lines().count(), 1);
    assert_eq!(
        fs::read_dir(dir.path()).unwrap().count(),
        1,
        "only the config file may exist"
    );
}

#[test]
fn error_classes_have_distinct_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");

    let missing = mvmfdr(&["solve", "--config", s(&dir.path().join("nope.toml")), "--out", s(&out)]);
    assert_eq!(missing.status.code(), Some(4));

    let broken = write_config(dir.path(), "broken.toml", "[array\nnum_sensors = 8");
    let syntax = mvmfdr(&["solve", "--config", s(&broken), "--out", s(&out)]);
    assert_eq!(syntax.status.code(), Some(2));

    let wrong_type = write_config(
        dir.path(),
        "type.toml",
        &PAPER.replace("num_sensors = 8", "num_sensors = \"8\""),
    );
    assert_eq!(
        mvmfdr(&["solve", "--config", s(&wrong_type), "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );

    let invalid = write_config(dir.path(), "inv.toml", &PAPER.replace("snr_db = 20.0", "snr_db = nan"));
    let inv = mvmfdr(&["solve", "--config", s(&invalid), "--out", s(&out)]);
    assert_eq!(inv.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&inv.stderr).contains("scenario.snr_db"));

    // one unloaded snapshot of an 8-sensor array: rank-one covariance
    let singular = PAPER.replace("num_snapshots = 64", "num_snapshots = 1").replace(
        "sir_ratio = 0.5",
        "sir_ratio = 0.5\ndiagonal_loading = { absolute = 0.0 }",
    );
    let singular = write_config(dir.path(), "sing.toml", &singular);
    let num = mvmfdr(&[
        "solve",
        "--config",
        s(&singular),
        "--out",
        s(&out),
        "--covariance",
        "sample",
    ]);
    assert_eq!(num.status.code(), Some(3), "{}", String::from_utf8_lossy(&num.stderr));
    assert!(String::from_utf8_lossy(&num.stderr).starts_with("error kind=numerical"));

    let unwritable = mvmfdr(&[
        "solve",
        "--config",
        s(&write_config(dir.path(), "ok.toml", PAPER)),
        "--out",
        s(&dir.path().join("no/such/dir/x.csv")),
    ]);
    assert_eq!(unwritable.status.code(), Some(4));

    assert!(!out.exists());
}

#[test]
fn omitted_fields_take_documented_defaults() {
    let minimal = r#"
        [array]
        num_sensors = 8
        half_wavelength_at_hz = 3.6e9

        [scenario]
        soi_doa_deg = 50.0
        band_lo_hz = 3.5e9
        band_hi_hz = 3.6e9
        constraint_freqs_hz = [3.5e9, 3.6e9]
        snr_db = 10.0
    "#;
    let cfg = parse_config_str(minimal, Path::new("minimal.toml")).unwrap();
    let scn = &cfg.scenario;
    assert_eq!(scn.constraint_gain_b, Complex64::new(1.0, 0.0));
    assert_eq!(scn.loading, DiagonalLoading::RelativeTrace(1e-6));
    assert_eq!(scn.sim_freqs_hz.len(), 21);
    assert_eq!(scn.sweep_points, 101);
    assert!(scn.interferer_doas_rad.is_empty());
    assert_eq!((scn.num_snapshots, scn.num_trials), (64, 500));
    assert_eq!(cfg.theta_points, 721);
    assert_eq!(cfg.pattern_freqs_hz, scn.constraint_freqs_hz);
    assert_eq!(cfg.covariance, None);
}

#[test]
fn weights_file_reproduces_emitted_patterns() {
    let dir = TempDir::new().unwrap();
    let cfg_path = write_config(dir.path(), "paper.toml", PAPER);
    let out = dir.path().join("fig1.csv");
    let res = mvmfdr(&["compare", "--config", s(&cfg_path), "--out", s(&out)]);
    assert!(res.status.success());

    let cfg = parse_config_str(PAPER, &cfg_path).unwrap();
    let scn = &cfg.scenario;
    let grid = theta_grid(&scn.geometry, cfg.theta_points);
    let rows = csv_rows(&out);
    let mut checked = 0;
    for (method, w) in read_weights_csv(&dir.path().join("fig1.weights.csv")).unwrap() {
        let fam = beam_pattern_family(&w, &scn.geometry, &cfg.pattern_freqs_hz, &grid, cfg.normalization).unwrap();
        let emitted: Vec<f64> = rows
            .iter()
            .filter(|r| r[0] == method)
            .map(|r| r[3].parse().unwrap())
            .collect();
        let recomputed: Vec<f64> = fam.iter().flat_map(|p| p.gains_db.iter().copied()).collect();
        assert_eq!(emitted.len(), recomputed.len());
        for (e, r) in emitted.iter().zip(&recomputed) {
            assert!((e - r).abs() <= 1e-9, "{method}: emitted {e}, recomputed {r}");
            checked += 1;
        }
    }
    assert_eq!(checked, 2 * 5 * 721);
}

#[test]
fn sweep_reports_absolute_soi_gain() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "paper.toml", PAPER);
    let out = dir.path().join("sweep.csv");
    assert!(mvmfdr(&["sweep", "--config", s(&cfg), "--out", s(&out)])
        .status
        .success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2 * 101);
    assert!(rows.iter().all(|r| r[2] == "50"));
    let gain = |m: &str| -> Vec<f64> {
        rows.iter()
            .filter(|r| r[0] == m)
            .map(|r| r[3].parse().unwrap())
            .collect()
    };
    let spread = |g: &[f64]| g.iter().cloned().fold(f64::MIN, f64::max) - g.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread(&gain("mvmfdr")) < spread(&gain("mvdr")));
}

#[test]
fn parallel_monte_carlo_matches_sequential() {
    let mut scn = parse_config_str(PAPER, Path::new("paper.toml")).unwrap().scenario;
    scn.num_trials = 40;
    let par = mvmfdr_cli::parallel_monte_carlo(&scn, mvmfdr::CovarianceSource::Sample).unwrap();
    let seq = mvmfdr::monte_carlo_compare(&scn, mvmfdr::CovarianceSource::Sample).unwrap();
    assert_eq!(par, seq);
}
