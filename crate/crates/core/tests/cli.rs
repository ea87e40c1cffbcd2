mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use udw_core::cli::{csv_text, emit_csv, manifest_path, run, verdicts_path, CsvRow, CSV_HEADER};
use udw_core::divergence::{log_grid, sweep, SweepParam, SweepResult, SweepSpec};
use udw_core::{compute_elements, ModelKind, Scenario};

use common::REFERENCE_TOML;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn udw(args: &[&str]) -> i32 {
    let mut argv = vec!["udw"];
    argv.extend_from_slice(args);
    run(&argv)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn elements_writes_json_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s0.toml", REFERENCE_TOML);
    let out = dir.path().join("s0.json");
    assert_eq!(udw(&["--out", s(&out), "elements", "--config", s(&cfg)]), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    for key in [
        "L_AA",
        "L_BB",
        "L_AB",
        "M",
        "errors",
        "settings_fingerprint",
        "negativity",
        "mutual_information",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["model"], "quadratic_real");
    assert_eq!(v["settings_fingerprint"], Scenario::default().fingerprint());
    assert_eq!(v["manifest"], s(&manifest_path(&out)));
    let m: Value = serde_json::from_str(&fs::read_to_string(manifest_path(&out)).unwrap()).unwrap();
    assert_eq!(m["outputs"][0], s(&out));
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert!(m["config"].as_str().unwrap().contains("quadratic_real"));
}

#[test]
fn binary_prints_json_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s0.toml",
        &REFERENCE_TOML.replace("quadratic_real", "linear"),
    );
    let out = Command::new(env!("CARGO_BIN_EXE_udw"))
        .args(["elements", "--config", s(&cfg)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["model"], "linear");
    assert!(v["L_AA"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn validation_failures_exit_one_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(
        dir.path(),
        "bad.toml",
        &REFERENCE_TOML.replacen("sigma = 1.0", "sigma = -1", 1),
    );
    let out = Command::new(env!("CARGO_BIN_EXE_udw"))
        .args(["elements", "--config", s(&bad)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));

    let unknown = write_config(
        dir.path(),
        "unk.toml",
        &REFERENCE_TOML.replace("[scenario]", "[scenario]\nbogus_key = 1"),
    );
    let out = Command::new(env!("CARGO_BIN_EXE_udw"))
        .args(["elements", "--config", s(&unknown)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));

    let out = Command::new(env!("CARGO_BIN_EXE_udw"))
        .args(["elements", "--config", s(&unknown), "--frobnicate"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--frobnicate"));

    assert_eq!(
        udw(&[
            "sweep",
            "--config",
            s(&bad),
            "--param",
            "volume",
            "--from",
            "1",
            "--to",
            "2",
            "--points",
            "5"
        ]),
        1
    );
    assert_eq!(udw(&["wightman", "--dt", "0", "--r", "1", "--eps", "0"]), 1);
    for flag in ["--help", "--version"] {
        let out = Command::new(env!("CARGO_BIN_EXE_udw"))
            .arg(flag)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn nonconvergence_exits_two_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    // narrow smearing puts hundreds of oscillations in the radial integral
    let narrow = REFERENCE_TOML
        .replace("sigma = 1.0", "sigma = 0.01")
        .replace("quadratic_real", "linear");
    let text = format!("{narrow}\n[quadrature]\nrel_tol = 1e-12\nmax_evals = 1000\n");
    let cfg = write_config(dir.path(), "tight.toml", &text);
    let out = dir.path().join("tight.json");
    assert_eq!(udw(&["--out", s(&out), "elements", "--config", s(&cfg)]), 2);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["converged"], false);
    assert_eq!(
        udw(&[
            "--allow-nonconverged",
            "--out",
            s(&out),
            "elements",
            "--config",
            s(&cfg)
        ]),
        0
    );
}

#[test]
fn sweep_csv_has_header_rows_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "lin.toml",
        &REFERENCE_TOML.replace("quadratic_real", "linear"),
    );
    let out = dir.path().join("sweep.csv");
    let code = udw(&[
        "--out",
        s(&out),
        "sweep",
        "--config",
        s(&cfg),
        "--param",
        "epsilon",
        "--from",
        "1e-3",
        "--to",
        "1e-1",
        "--points",
        "12",
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    assert_eq!(lines[0], CSV_HEADER);
    let xs: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(xs.windows(2).all(|w| w[1] > w[0]));
    for l in &lines[1..] {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols.len(), 15);
        assert_eq!(cols[1], "linear");
        // 15 significant digits
        assert_eq!(cols[2].split('e').next().unwrap().len(), 16);
    }
    let verdicts: Value =
        serde_json::from_str(&fs::read_to_string(verdicts_path(&out)).unwrap()).unwrap();
    assert_eq!(verdicts["verdicts"]["M"]["classification"], "Convergent");
    assert_eq!(verdicts["manifest"], s(&manifest_path(&out)));
    assert!(manifest_path(&out).exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s0.toml", REFERENCE_TOML);
    let run_once = |tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let json = dir.path().join(format!("{tag}.json"));
        assert_eq!(
            udw(&[
                "--seed",
                "42",
                "--out",
                s(&csv),
                "sweep",
                "--config",
                s(&cfg),
                "--param",
                "epsilon",
                "--from",
                "1e-3",
                "--to",
                "1e-1",
                "--points",
                "6",
            ]),
            0
        );
        assert_eq!(
            udw(&[
                "--seed",
                "42",
                "--out",
                s(&json),
                "elements",
                "--config",
                s(&cfg)
            ]),
            0
        );
        (
            fs::read(&csv).unwrap(),
            fs::read(verdicts_path(&csv)).unwrap(),
            fs::read(&json).unwrap(),
        )
    };
    let (c1, v1, j1) = run_once("one");
    let (c2, v2, j2) = run_once("two");
    assert_eq!(c1, c2);
    // sidecars embed their own manifest path
    let strip = |b: Vec<u8>, tag: &str| String::from_utf8(b).unwrap().replace(tag, "");
    assert_eq!(strip(v1, "one"), strip(v2, "two"));
    assert_eq!(strip(j1, "one"), strip(j2, "two"));
}

#[test]
fn one_point_csv_is_two_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s0.toml", REFERENCE_TOML);
    let csv = dir.path().join("one.csv");
    let out = dir.path().join("one.json");
    assert_eq!(
        udw(&[
            "--out",
            s(&out),
            "elements",
            "--config",
            s(&cfg),
            "--csv",
            s(&csv)
        ]),
        0
    );
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 2);

    let set = compute_elements(&Scenario::default()).unwrap();
    let text = csv_text(&[CsvRow::new(0.01, &set)]);
    assert_eq!(text.lines().count(), 2);
    assert!(text.ends_with(",\n"));
}

#[test]
fn emit_csv_reports_path_on_error_and_refuses_empty_results() {
    let base = Scenario::reference(ModelKind::Linear);
    let result = sweep(&SweepSpec::new(
        base,
        SweepParam::Epsilon,
        log_grid(1e-2, 1e-1, 5),
    ))
    .unwrap();
    let err = emit_csv(&result, Path::new("/no/such/dir/out.csv")).unwrap_err();
    assert!(err.to_string().contains("/no/such/dir/out.csv"));
    let empty = SweepResult {
        spec: result.spec.clone(),
        points: vec![],
    };
    let dir = tempfile::tempdir().unwrap();
    assert!(emit_csv(&empty, &dir.path().join("e.csv")).is_err());
    let ok = dir.path().join("ok.csv");
    emit_csv(&result, &ok).unwrap();
    assert_eq!(fs::read_to_string(ok).unwrap().lines().count(), 6);
}

#[test]
fn compare_and_oracle_tables_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s0.toml", REFERENCE_TOML);
    let table = dir.path().join("compare.txt");
    assert_eq!(
        udw(&["--out", s(&table), "compare", "--config", s(&cfg)]),
        0
    );
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.matches("PASS").count(), 12);
    assert!(!text.contains("FAIL"));

    let wick = dir.path().join("wick.txt");
    assert_eq!(
        udw(&[
            "--out",
            s(&wick),
            "oracle",
            "wick",
            "--modes",
            "3",
            "--trials",
            "10"
        ]),
        0
    );
    let text = fs::read_to_string(&wick).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 6);

    let pos = dir.path().join("pos.txt");
    assert_eq!(
        udw(&[
            "--out",
            s(&pos),
            "oracle",
            "position",
            "--config",
            s(&cfg),
            "--samples",
            "200000"
        ]),
        0
    );
    assert_eq!(fs::read_to_string(&pos).unwrap().matches("PASS").count(), 4);
}

#[test]
fn wightman_prints_fifteen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.txt");
    assert_eq!(
        udw(&[
            "--out",
            s(&out),
            "wightman",
            "--dt",
            "-0.5",
            "--r",
            "1",
            "--eps",
            "0.01"
        ]),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    let parts: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(parts.len(), 2);
    // r² − (Δt − iε)² = 1 − (0.25 − 0.0001 + 0.01i)
    let d = num_complex::Complex64::new(0.7501, -0.01);
    let w = d.inv() / (4.0 * std::f64::consts::PI.powi(2));
    assert!((parts[0] - w.re).abs() < 1e-15 && (parts[1] - w.im).abs() < 1e-15);
}

#[test]
fn rho_prints_matrix_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s0.toml", REFERENCE_TOML);
    let out = dir.path().join("rho.txt");
    assert_eq!(
        udw(&["--out", s(&out), "rho", "--config", s(&cfg), "--swap-inner"]),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    assert!(text
        .lines()
        .take(4)
        .all(|l| l.split_whitespace().count() == 4));
    assert!(text.contains("\"negativity\""));
}
